//! Nonlinear eigenvalue problems `T(z) v = 0`.
//!
//! Every problem implements [`NepProblem`]. Problems with an explicit
//! representation `T(z) = Σ_j T_j f_j(z)` also expose their terms, which lets
//! the driver project each coefficient once instead of interpolating.

mod acoustic;
pub(crate) mod functions;
mod linear;
pub mod mmio;
mod sparse;
mod string;
mod tridiag;

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{solve_dense, ComplexMatrix};

pub use acoustic::{make_acoustic_1d, Acoustic1d};
pub use functions::{BiotModulus, ScalarFunction};
pub use linear::{random_linear_pencil, LinearOracle};
pub use sparse::{CoeffMatrix, CsrMatrix};
pub use string::{make_loaded_string, LoadedString};
pub use tridiag::Tridiagonal;

/// Matrix-valued function whose singular points are the eigenvalues.
pub trait NepProblem: Send + Sync {
    fn dim(&self) -> usize;

    /// Dense `T(z)`.
    fn assemble(&self, z: Complex64) -> Result<ComplexMatrix>;

    /// Dense `dT/dz`.
    fn derivative_assemble(&self, z: Complex64) -> Result<ComplexMatrix>;

    /// `T(z) X`.
    fn apply(&self, z: Complex64, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        Ok(self.assemble(z)?.matmul(x))
    }

    /// `T(z)⁻¹ B`.
    fn solve(&self, z: Complex64, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        solve_dense(&self.assemble(z)?, b)
    }

    /// Terms of the explicit sum form, when the problem has one.
    fn sum_terms(&self) -> Option<&[SumTerm]> {
        None
    }
}

impl<P: NepProblem + ?Sized> NepProblem for Box<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn assemble(&self, z: Complex64) -> Result<ComplexMatrix> {
        (**self).assemble(z)
    }
    fn derivative_assemble(&self, z: Complex64) -> Result<ComplexMatrix> {
        (**self).derivative_assemble(z)
    }
    fn apply(&self, z: Complex64, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        (**self).apply(z, x)
    }
    fn solve(&self, z: Complex64, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        (**self).solve(z, b)
    }
    fn sum_terms(&self) -> Option<&[SumTerm]> {
        (**self).sum_terms()
    }
}

/// One term `T_j f_j(z)`. Terms may share a coefficient matrix through the `Arc`.
#[derive(Clone, Debug)]
pub struct SumTerm {
    pub matrix: Arc<CoeffMatrix>,
    pub function: ScalarFunction,
}

impl SumTerm {
    pub fn new(matrix: impl Into<CoeffMatrix>, function: ScalarFunction) -> Self {
        Self { matrix: Arc::new(matrix.into()), function }
    }

    pub fn shared(matrix: Arc<CoeffMatrix>, function: ScalarFunction) -> Self {
        Self { matrix, function }
    }
}

/// Dense `Σ_j f_j(z) T_j`, accumulated in term order.
pub(crate) fn assemble_terms(terms: &[SumTerm], n: usize, z: Complex64) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(n, n);
    for t in terms {
        t.matrix.add_scaled_into(t.function.eval(z)?, &mut out);
    }
    Ok(out)
}

pub(crate) fn assemble_term_derivatives(terms: &[SumTerm], n: usize, z: Complex64) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(n, n);
    for t in terms {
        t.matrix.add_scaled_into(t.function.derivative(z)?, &mut out);
    }
    Ok(out)
}

pub(crate) fn apply_terms(terms: &[SumTerm], z: Complex64, x: &ComplexMatrix) -> Result<ComplexMatrix> {
    let mut out = ComplexMatrix::zeros(terms[0].matrix.nrows(), x.ncols());
    for t in terms {
        let f = t.function.eval(z)?;
        out.add_scaled(f, &t.matrix.mul_dense(x));
    }
    Ok(out)
}

/// `T(z) = Σ_j T_j f_j(z)` with coefficient matrices held in memory.
#[derive(Clone, Debug)]
pub struct SumFormNep {
    n: usize,
    terms: Vec<SumTerm>,
}

/// Problems up to this size are solved densely even with sparse coefficients.
const DENSE_SOLVE_LIMIT: usize = 200;

impl SumFormNep {
    pub fn new(terms: Vec<SumTerm>) -> Result<Self> {
        let first = terms
            .first()
            .ok_or_else(|| Error::InvalidParameter("sum form needs at least one term".into()))?;
        let n = first.matrix.nrows();
        for (j, t) in terms.iter().enumerate() {
            if t.matrix.nrows() != n || t.matrix.ncols() != n {
                return Err(Error::DimensionMismatch(format!(
                    "term {j} is {}x{}, expected {n}x{n}",
                    t.matrix.nrows(),
                    t.matrix.ncols()
                )));
            }
        }
        Ok(Self { n, terms })
    }

    pub fn terms(&self) -> &[SumTerm] {
        &self.terms
    }
}

impl NepProblem for SumFormNep {
    fn dim(&self) -> usize {
        self.n
    }

    fn assemble(&self, z: Complex64) -> Result<ComplexMatrix> {
        assemble_terms(&self.terms, self.n, z)
    }

    fn derivative_assemble(&self, z: Complex64) -> Result<ComplexMatrix> {
        assemble_term_derivatives(&self.terms, self.n, z)
    }

    fn apply(&self, z: Complex64, x: &ComplexMatrix) -> Result<ComplexMatrix> {
        apply_terms(&self.terms, z, x)
    }

    fn solve(&self, z: Complex64, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let sparse: Option<Vec<&CsrMatrix>> = self
            .terms
            .iter()
            .map(|t| match t.matrix.as_ref() {
                CoeffMatrix::Sparse(m) => Some(m),
                CoeffMatrix::Dense(_) => None,
            })
            .collect();
        match sparse {
            Some(mats) if self.n > DENSE_SOLVE_LIMIT => {
                let coeffs = self
                    .terms
                    .iter()
                    .map(|t| t.function.eval(z))
                    .collect::<Result<Vec<_>>>()?;
                let parts: Vec<_> = coeffs.into_iter().zip(mats).collect();
                sparse::sparse_combination_solve(self.n, &parts, b)
            }
            _ => solve_dense(&self.assemble(z)?, b),
        }
    }

    fn sum_terms(&self) -> Option<&[SumTerm]> {
        Some(&self.terms)
    }
}

/// Standard eigenproblem `(A − zI) v = 0` as a sum-form problem.
pub fn make_linear_pencil(a: ComplexMatrix) -> Result<SumFormNep> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("linear pencil needs a square matrix".into()));
    }
    let n = a.nrows();
    SumFormNep::new(vec![
        SumTerm::new(a, ScalarFunction::Constant { value: Complex64::ONE }),
        SumTerm::new(
            CsrMatrix::from_triplets(n, n, &(0..n).map(|i| (i, i, Complex64::ONE)).collect::<Vec<_>>())?,
            ScalarFunction::Power { coeff: Complex64::new(-1.0, 0.0), exponent: 1 },
        ),
    ])
}

/// `T(z) = K − z² M + i√(z²−σ₁²) W₁ + i√(z²−σ₂²) W₂` with principal square roots.
pub fn make_gun_form(
    stiffness: impl Into<CoeffMatrix>,
    mass: impl Into<CoeffMatrix>,
    w1: impl Into<CoeffMatrix>,
    w2: impl Into<CoeffMatrix>,
    sigma1: f64,
    sigma2: f64,
) -> Result<SumFormNep> {
    if !(sigma1 >= 0.0 && sigma2 >= 0.0) {
        return Err(Error::InvalidParameter(format!("sigma values must be >= 0, got {sigma1}, {sigma2}")));
    }
    SumFormNep::new(vec![
        SumTerm::new(stiffness, ScalarFunction::Constant { value: Complex64::ONE }),
        SumTerm::new(mass, ScalarFunction::Power { coeff: Complex64::new(-1.0, 0.0), exponent: 2 }),
        SumTerm::new(w1, ScalarFunction::BranchSqrt { sigma: sigma1 }),
        SumTerm::new(w2, ScalarFunction::BranchSqrt { sigma: sigma2 }),
    ])
}

/// Viscoelastic Biot form `T(z) = z² M + G(z) K_v + K_s`.
pub fn make_biot_damped(
    mass: impl Into<CoeffMatrix>,
    viscous: impl Into<CoeffMatrix>,
    stiffness: impl Into<CoeffMatrix>,
    modulus: &BiotModulus,
) -> Result<SumFormNep> {
    modulus.validate()?;
    let viscous = Arc::new(viscous.into());
    let mut terms = vec![
        SumTerm::new(mass, ScalarFunction::Power { coeff: Complex64::ONE, exponent: 2 }),
        SumTerm::new(stiffness, ScalarFunction::Constant { value: Complex64::ONE }),
    ];
    if modulus.leading_one {
        terms.push(SumTerm::shared(
            viscous.clone(),
            ScalarFunction::Constant { value: Complex64::new(modulus.g_inf, 0.0) },
        ));
    }
    for (&a, &b) in modulus.a.iter().zip(&modulus.b) {
        terms.push(SumTerm::shared(
            viscous.clone(),
            ScalarFunction::Rational {
                a: Complex64::new(modulus.g_inf * a, 0.0),
                b: Complex64::new(b, 0.0),
            },
        ));
    }
    SumFormNep::new(terms)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::linalg::eig_dense;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    pub(crate) fn random_symmetric(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = c(rng.random_range(-1.0..1.0), 0.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        m
    }

    /// Ratio of central-difference errors at h = 1e-3 and 1e-4.
    pub(crate) fn central_difference_ratio(p: &dyn NepProblem, z: Complex64) -> (f64, f64) {
        let exact = p.derivative_assemble(z).unwrap();
        let err = |h: f64| {
            let fd = p
                .assemble(z + h)
                .unwrap()
                .sub(&p.assemble(z - h).unwrap())
                .scaled(c(0.5 / h, 0.0));
            fd.sub(&exact).norm_fro()
        };
        let (e3, e4) = (err(1e-3), err(1e-4));
        (e3 / e4, e4 / exact.norm_fro())
    }

    #[test]
    fn sum_form_rejects_mismatched_terms() {
        let r = SumFormNep::new(vec![
            SumTerm::new(ComplexMatrix::identity(2), ScalarFunction::Constant { value: Complex64::ONE }),
            SumTerm::new(ComplexMatrix::identity(3), ScalarFunction::Constant { value: Complex64::ONE }),
        ]);
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
        assert!(SumFormNep::new(vec![]).is_err());
    }

    #[test]
    fn gun_with_zero_sigma_reduces_to_iz() {
        let f = ScalarFunction::BranchSqrt { sigma: 0.0 };
        for z in [c(1.0, 0.5), c(200.0, -3.0), c(0.1, 10.0)] {
            assert!((f.eval(z).unwrap() - Complex64::I * z).norm() < 1e-12 * z.norm());
        }
    }

    #[test]
    fn gun_without_damping_matches_generalized_eigenvalues() {
        let n = 6;
        let k = random_symmetric(n, 1);
        let mut m = ComplexMatrix::identity(n);
        m[(0, 0)] = c(2.0, 0.0);
        let zero = ComplexMatrix::zeros(n, n);
        let p = make_gun_form(k.clone(), m.clone(), zero.clone(), zero, 0.0, 108.8774).unwrap();
        // oracle: eigenvalues μ of M⁻¹K, then z = ±√μ
        let mu = eig_dense(&solve_dense(&m, &k).unwrap()).unwrap().values;
        for m_val in mu {
            let z = m_val.sqrt() + c(0.0, 0.0);
            let t = p.assemble(z).unwrap();
            let s = crate::linalg::singular_values(&t).unwrap();
            assert!(s[n - 1] <= 1e-10 * s[0], "z={z} smin={}", s[n - 1]);
        }
    }

    #[test]
    fn gun_dimension_mismatch() {
        let r = make_gun_form(
            ComplexMatrix::identity(3),
            ComplexMatrix::identity(3),
            ComplexMatrix::identity(2),
            ComplexMatrix::identity(3),
            0.0,
            1.0,
        );
        assert!(matches!(r, Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn biot_derivative_matches_finite_differences() {
        let n = 4;
        let modulus = BiotModulus {
            g_inf: 2.5,
            a: vec![0.7, 1.8, 4.0],
            b: vec![0.5, 3.0, 12.0],
            leading_one: false,
        };
        let p = make_biot_damped(
            ComplexMatrix::identity(n),
            random_symmetric(n, 2),
            random_symmetric(n, 3),
            &modulus,
        )
        .unwrap();
        let (ratio, rel) = central_difference_ratio(&p, c(-0.2, 0.4));
        assert!((80.0..=120.0).contains(&ratio), "ratio {ratio}");
        assert!(rel < 1e-6);
    }

    #[test]
    fn biot_pole_is_reported() {
        let modulus = BiotModulus { g_inf: 1.0, a: vec![1.0], b: vec![2.0], leading_one: true };
        let p = make_biot_damped(
            ComplexMatrix::identity(2),
            ComplexMatrix::identity(2),
            ComplexMatrix::identity(2),
            &modulus,
        )
        .unwrap();
        assert!(matches!(p.assemble(c(-2.0, 0.0)), Err(Error::PoleEvaluation { .. })));
        assert_eq!(p.terms().len(), 4);
    }

    #[test]
    fn gun_derivative_matches_finite_differences() {
        let n = 3;
        let p = make_gun_form(
            random_symmetric(n, 4),
            ComplexMatrix::identity(n),
            random_symmetric(n, 5),
            random_symmetric(n, 6),
            0.0,
            1.0,
        )
        .unwrap();
        let (ratio, _) = central_difference_ratio(&p, c(1.2, 0.3));
        assert!((80.0..=120.0).contains(&ratio), "ratio {ratio}");
    }

    #[test]
    fn solve_recovers_rhs_for_sum_forms() {
        let n = 5;
        let p = make_gun_form(
            random_symmetric(n, 7),
            ComplexMatrix::identity(n),
            random_symmetric(n, 8),
            random_symmetric(n, 9),
            0.5,
            2.0,
        )
        .unwrap();
        let x0 = ComplexMatrix::from_fn(n, 2, |i, j| c(i as f64, 1.0 - j as f64));
        for z in [c(1.0, 0.2), c(3.0, 1.0)] {
            let b = p.assemble(z).unwrap().matmul(&x0);
            let x = p.solve(z, &b).unwrap();
            assert!(x.sub(&x0).norm_fro() <= 1e-9 * x0.norm_fro());
            assert!(p.apply(z, &x0).unwrap().sub(&b).norm_fro() <= 1e-12 * b.norm_fro());
        }
    }

    #[test]
    fn large_sparse_sum_form_uses_sparse_solver() {
        let n = 300;
        let one = Complex64::ONE;
        let k = CsrMatrix::tridiagonal(&vec![-one; n - 1], &vec![one * 2.0; n], &vec![-one; n - 1]);
        let m = CsrMatrix::from_triplets(n, n, &(0..n).map(|i| (i, i, one)).collect::<Vec<_>>()).unwrap();
        let p = SumFormNep::new(vec![
            SumTerm::new(k, ScalarFunction::Constant { value: one }),
            SumTerm::new(m, ScalarFunction::Power { coeff: -one, exponent: 2 }),
        ])
        .unwrap();
        let x0 = ComplexMatrix::from_fn(n, 1, |i, _| c((i as f64).sin(), 0.5));
        let z = c(0.3, 0.1);
        let b = p.apply(z, &x0).unwrap();
        let x = p.solve(z, &b).unwrap();
        assert!(x.sub(&x0).norm_fro() <= 1e-9 * x0.norm_fro());
    }
}
