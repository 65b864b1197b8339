use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the solver stack.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is numerically singular (pivot {pivot} has magnitude {magnitude:.3e})")]
    SingularMatrix { pivot: usize, magnitude: f64 },

    #[error("matrix is singular at sampling node {index} (z = {z})")]
    SingularAtNode { index: usize, z: Complex64 },

    #[error("reduced matrix is singular at quadrature node {index} (z = {z})")]
    SingularReduced { index: usize, z: Complex64 },

    #[error("iterative decomposition did not converge: {0}")]
    ConvergenceFailure(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("evaluation at z = {z} hits a pole or branch point of {what}")]
    PoleEvaluation { z: Complex64, what: &'static str },

    #[error("source matrix is numerically zero; no basis can be extracted")]
    EmptyBasis,

    #[error("probe matrix is rank deficient (sigma_min / sigma_max = {ratio:.3e})")]
    RankDeficientProbe { ratio: f64 },

    #[error("winding number {value:.6} is not close to an integer and no singular value gap was found")]
    NonIntegerWinding { value: f64 },

    #[error("Hankel matrix rank collapse: sigma_{count} / sigma_1 = {ratio:.3e}")]
    RankCollapse { count: usize, ratio: f64 },

    #[error("{} eigenpair(s) exceed the residual tolerance {tol:.1e}", .indices.len())]
    ResidualFailure { indices: Vec<usize>, residuals: Vec<f64>, tol: f64 },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    #[error("unsupported Matrix Market field `{0}`")]
    UnsupportedField(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
