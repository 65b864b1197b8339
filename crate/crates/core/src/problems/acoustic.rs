use std::f64::consts::PI;

use num_complex::Complex64;

use super::tridiag::tridiagonal_from_terms;
use super::{
    apply_terms, assemble_term_derivatives, assemble_terms, CoeffMatrix, CsrMatrix, NepProblem, ScalarFunction,
    SumTerm,
};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Finite-element model of a 1D time-harmonic wave with an impedance end:
/// `T(z) = z² M + z C + K`.
///
/// All three coefficients are tridiagonal, so `solve` factors `T(z)` in `O(n)`.
#[derive(Clone, Debug)]
pub struct Acoustic1d {
    n: usize,
    zeta: Complex64,
    terms: Vec<SumTerm>,
}

pub fn make_acoustic_1d(n: usize, zeta: Complex64) -> Result<Acoustic1d> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("acoustic-1d needs n >= 2, got {n}")));
    }
    if zeta == Complex64::ZERO {
        return Err(Error::InvalidParameter("acoustic-1d impedance zeta must be nonzero".into()));
    }
    let nf = n as f64;
    let last = n - 1;

    let mut m_diag = vec![Complex64::new(-4.0 * PI * PI / nf, 0.0); n];
    m_diag[last] *= 0.5;
    let mass = CsrMatrix::tridiagonal(&vec![Complex64::ZERO; n - 1], &m_diag, &vec![Complex64::ZERO; n - 1]);

    let damping = CsrMatrix::from_triplets(n, n, &[(last, last, 2.0 * PI * Complex64::I / zeta)])?;

    let off = vec![Complex64::new(-nf, 0.0); n - 1];
    let mut k_diag = vec![Complex64::new(2.0 * nf, 0.0); n];
    k_diag[last] = Complex64::new(nf, 0.0);
    let stiffness = CsrMatrix::tridiagonal(&off, &k_diag, &off);

    let terms = vec![
        SumTerm::new(mass, ScalarFunction::Power { coeff: Complex64::ONE, exponent: 2 }),
        SumTerm::new(damping, ScalarFunction::Power { coeff: Complex64::ONE, exponent: 1 }),
        SumTerm::new(stiffness, ScalarFunction::Constant { value: Complex64::ONE }),
    ];
    Ok(Acoustic1d { n, zeta, terms })
}

impl Acoustic1d {
    pub fn zeta(&self) -> Complex64 {
        self.zeta
    }

    fn coefficient(&self, k: usize) -> &CsrMatrix {
        match self.terms[k].matrix.as_ref() {
            CoeffMatrix::Sparse(m) => m,
            CoeffMatrix::Dense(_) => unreachable!("acoustic coefficients are sparse"),
        }
    }

    pub fn mass(&self) -> &CsrMatrix {
        self.coefficient(0)
    }

    pub fn damping(&self) -> &CsrMatrix {
        self.coefficient(1)
    }

    pub fn stiffness(&self) -> &CsrMatrix {
        self.coefficient(2)
    }
}

impl NepProblem for Acoustic1d {
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
        tridiagonal_from_terms(&self.terms, self.n, z)?.solve(b)
    }

    fn sum_terms(&self) -> Option<&[SumTerm]> {
        Some(&self.terms)
    }
}
