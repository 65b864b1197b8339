//! Eigenspace construction: the resolvent sampling matrix `Ŝ`, the moment
//! matrix `M̂` of the classical scheme, and truncated-SVD bases.
//!
//! All resolvent solves run as a parallel map over the nodes. Results are
//! placed by node index, so the output never depends on scheduling.

use std::io::Write;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::contour::QuadratureSet;
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, singular_values, svd, ComplexMatrix};
use crate::problems::NepProblem;

/// Random `n × L` probe matrix with independent standard normal real and imaginary parts.
#[derive(Clone, Debug)]
pub struct ProbeMatrix {
    u: ComplexMatrix,
    seed: Option<u64>,
}

impl ProbeMatrix {
    pub fn random(n: usize, width: usize, seed: u64) -> Result<Self> {
        if n == 0 || width == 0 || width > n {
            return Err(Error::InvalidParameter(format!("rsrr.L: probe width {width} must be in 1..={n}")));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut u = ComplexMatrix::zeros(n, width);
        for j in 0..width {
            for v in u.col_mut(j) {
                let re: f64 = StandardNormal.sample(&mut rng);
                let im: f64 = StandardNormal.sample(&mut rng);
                *v = Complex64::new(re, im);
            }
        }
        let mut p = Self::from_matrix(u)?;
        p.seed = Some(seed);
        Ok(p)
    }

    /// Wraps a user matrix after checking `σ_L ≥ 1e-8 σ₁`.
    pub fn from_matrix(u: ComplexMatrix) -> Result<Self> {
        let s = singular_values(&u)?;
        let ratio = match (s.first(), s.last()) {
            (Some(&s1), Some(&sl)) if s1 > 0.0 => sl / s1,
            _ => 0.0,
        };
        if ratio < 1e-8 {
            return Err(Error::RankDeficientProbe { ratio });
        }
        Ok(Self { u, seed: None })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.u
    }

    pub fn width(&self) -> usize {
        self.u.ncols()
    }

    pub fn seed(&self) -> Option<u64> {
        self.seed
    }
}

/// Probed resolvent blocks `T(z_i)⁻¹ U`, one per node, in node order.
#[derive(Clone, Debug)]
pub struct ResolventSamples {
    /// Nodes actually used; a node that hit an eigenvalue appears perturbed.
    pub nodes: Vec<Complex64>,
    pub blocks: Vec<ComplexMatrix>,
    /// Indices of perturbed nodes.
    pub perturbed: Vec<usize>,
}

impl ResolventSamples {
    /// `Ŝ = [T(z_0)⁻¹U | … | T(z_{N−1})⁻¹U]`
    pub fn sampling_matrix(&self) -> Result<ComplexMatrix> {
        ComplexMatrix::hstack(&self.blocks)
    }
}

fn node_error(index: usize, z: Complex64, e: Error) -> Error {
    match e {
        Error::SingularMatrix { .. } => Error::SingularAtNode { index, z },
        other => other,
    }
}

/// `Ŝ` on an arbitrary node list. A singular node is an error.
pub fn build_sampling_matrix(
    problem: &dyn NepProblem,
    nodes: &[Complex64],
    probe: &ProbeMatrix,
) -> Result<ComplexMatrix> {
    check_probe(problem, probe)?;
    let blocks = nodes
        .par_iter()
        .enumerate()
        .map(|(i, &z)| problem.solve(z, probe.matrix()).map_err(|e| node_error(i, z, e)))
        .collect::<Result<Vec<_>>>()?;
    ComplexMatrix::hstack(&blocks)
}

fn check_probe(problem: &dyn NepProblem, probe: &ProbeMatrix) -> Result<()> {
    if probe.matrix().nrows() != problem.dim() {
        return Err(Error::DimensionMismatch(format!(
            "probe has {} rows, problem dimension is {}",
            probe.matrix().nrows(),
            problem.dim()
        )));
    }
    Ok(())
}

/// Resolvent blocks at the quadrature nodes. A node where `T(z)` is singular
/// is moved once by `1e-8 ρ` along the contour tangent before giving up.
pub fn sample_resolvent(
    problem: &dyn NepProblem,
    quad: &QuadratureSet,
    probe: &ProbeMatrix,
) -> Result<ResolventSamples> {
    check_probe(problem, probe)?;
    let solved: Vec<(Complex64, bool, ComplexMatrix)> = quad
        .nodes
        .par_iter()
        .enumerate()
        .map(|(i, &z)| match problem.solve(z, probe.matrix()) {
            Ok(x) => Ok((z, false, x)),
            Err(Error::SingularMatrix { .. }) => {
                let moved = quad.perturbed_node(i);
                log::warn!("T(z) singular at node {i} (z = {z}); retrying at {moved}");
                problem
                    .solve(moved, probe.matrix())
                    .map(|x| (moved, true, x))
                    .map_err(|e| node_error(i, moved, e))
            }
            Err(e) => Err(e),
        })
        .collect::<Result<_>>()?;

    let mut out = ResolventSamples { nodes: Vec::new(), blocks: Vec::new(), perturbed: Vec::new() };
    for (i, (z, moved, x)) in solved.into_iter().enumerate() {
        if moved {
            out.perturbed.push(i);
        }
        out.nodes.push(z);
        out.blocks.push(x);
    }
    Ok(out)
}

/// Scalar basis used to weight the moments of the classical scheme.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentBasis {
    /// `x^α`
    #[default]
    Monomial,
    /// `τ_α(x)`, first kind
    Chebyshev,
}

impl MomentBasis {
    /// The first `count` basis values at `x`.
    pub fn values(self, x: Complex64, count: usize) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(count);
        if count == 0 {
            return out;
        }
        out.push(Complex64::ONE);
        if count > 1 {
            out.push(x);
        }
        for k in 2..count {
            let next = match self {
                MomentBasis::Monomial => out[k - 1] * x,
                MomentBasis::Chebyshev => x * 2.0 * out[k - 1] - out[k - 2],
            };
            out.push(next);
        }
        out
    }
}

/// `M̂ = [M̂_0 | … | M̂_{K′−1}]` with `M̂_α = Σ_i w_i b_α((z_i − γ)/ρ) T(z_i)⁻¹U`.
pub fn moment_matrix_from_samples(
    samples: &ResolventSamples,
    weights: &[Complex64],
    center: Complex64,
    scale: f64,
    k_prime: usize,
    basis: MomentBasis,
) -> Result<ComplexMatrix> {
    if k_prime == 0 {
        return Err(Error::InvalidParameter("K_prime must be >= 1".into()));
    }
    if weights.len() != samples.blocks.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} weights for {} samples",
            weights.len(),
            samples.blocks.len()
        )));
    }
    let first = samples.blocks.first().ok_or(Error::EmptyBasis)?;
    let (n, l) = (first.nrows(), first.ncols());
    let mut out = ComplexMatrix::zeros(n, k_prime * l);
    for ((&z, &w), block) in samples.nodes.iter().zip(weights).zip(&samples.blocks) {
        let values = basis.values((z - center) / scale, k_prime);
        for (alpha, b) in values.into_iter().enumerate() {
            let coeff = w * b;
            for c in 0..l {
                let dst = out.col_mut(alpha * l + c);
                for (d, s) in dst.iter_mut().zip(block.col(c)) {
                    *d += coeff * s;
                }
            }
        }
    }
    Ok(out)
}

/// `M̂` computed from fresh resolvent solves on `quad`.
pub fn build_moment_matrix(
    problem: &dyn NepProblem,
    quad: &QuadratureSet,
    probe: &ProbeMatrix,
    center: Complex64,
    k_prime: usize,
    basis: MomentBasis,
) -> Result<ComplexMatrix> {
    let samples = sample_resolvent(problem, quad, probe)?;
    moment_matrix_from_samples(&samples, &quad.weights, center, quad.scale, k_prime, basis)
}

/// Orthonormal basis from a truncated SVD.
#[derive(Clone, Debug)]
pub struct SubspaceBasis {
    /// `n × k_S`, orthonormal columns.
    pub basis: ComplexMatrix,
    /// Full singular value list of the source.
    pub singular_values: Vec<f64>,
    pub rank: usize,
    pub delta: f64,
}

impl SubspaceBasis {
    /// `σ₁ / σ_min` of the source; large values mean the sampling saturated the eigenspace.
    pub fn spectrum_ratio(&self) -> f64 {
        match (self.singular_values.first(), self.singular_values.last()) {
            (Some(&s1), Some(&sl)) if sl > 0.0 => s1 / sl,
            _ => f64::INFINITY,
        }
    }
}

/// Left singular vectors with `σ_i ≥ δ σ₁`.
pub fn orthonormal_basis(source: &ComplexMatrix, delta: f64) -> Result<SubspaceBasis> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("rsrr.delta: must lie in (0, 1), got {delta}")));
    }
    if source.ncols() == 0 || source.nrows() == 0 {
        return Err(Error::EmptyBasis);
    }
    let dec = svd(source)?;
    let s1 = dec.singular_values.first().copied().unwrap_or(0.0);
    if !(s1 > f64::MIN_POSITIVE) || !s1.is_finite() {
        return Err(Error::EmptyBasis);
    }
    let rank = numerical_rank(&dec.singular_values, delta);
    Ok(SubspaceBasis {
        basis: dec.u.columns(0..rank),
        singular_values: dec.singular_values,
        rank,
        delta,
    })
}

/// Sines of the principal angles between two column spaces, largest first.
pub fn principal_angle_sines(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Vec<f64>> {
    let qa = orthonormal_basis(a, 1e-12)?.basis;
    let qb = orthonormal_basis(b, 1e-12)?.basis;
    let residual = qb.sub(&qa.matmul(&qa.adjoint_mul(&qb)));
    singular_values(&residual)
}

/// Largest principal angle in radians.
pub fn max_principal_angle(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<f64> {
    let s = principal_angle_sines(a, b)?;
    Ok(s.first().copied().unwrap_or(0.0).min(1.0).asin())
}

/// Numerical rank of a generalized Vandermonde matrix for one `K′`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankRow {
    #[serde(rename = "K_prime")]
    pub k_prime: usize,
    pub rank: usize,
}

/// Rank of `B = [b_α(λ_i)]` (`n_C × K′`) at threshold `tol · σ₁`, for `K′ = 1..=k_max`.
pub fn vandermonde_rank_experiment(
    eigs: &[f64],
    k_max: usize,
    tol: f64,
    basis: MomentBasis,
) -> Result<Vec<RankRow>> {
    if !(tol > 0.0 && tol < 1.0) {
        return Err(Error::InvalidParameter(format!("tol must lie in (0, 1), got {tol}")));
    }
    if k_max < 2 {
        return Err(Error::InvalidParameter(format!("kmax must be >= 2, got {k_max}")));
    }
    if eigs.is_empty() {
        return Err(Error::InvalidParameter("eigenvalue list is empty".into()));
    }
    let table: Vec<Vec<Complex64>> = eigs
        .iter()
        .map(|&x| basis.values(Complex64::new(x, 0.0), k_max))
        .collect();
    (1..=k_max)
        .into_par_iter()
        .map(|k| {
            let b = ComplexMatrix::from_fn(eigs.len(), k, |i, j| table[i][j]);
            let rank = numerical_rank(&singular_values(&b)?, tol);
            Ok(RankRow { k_prime: k, rank })
        })
        .collect()
}

/// `K_prime,rank` CSV.
pub fn write_rank_csv<W: Write>(out: W, rows: &[RankRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row).map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}

pub(crate) fn csv_error(e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        other => Error::InvalidParameter(format!("csv: {other:?}")),
    }
}
