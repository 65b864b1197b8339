use num_complex::Complex64;

use super::tridiag::tridiagonal_from_terms;
use super::{
    apply_terms, assemble_term_derivatives, assemble_terms, CoeffMatrix, CsrMatrix, NepProblem, ScalarFunction,
    SumTerm,
};
use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// String with a unit-mass load attached by a spring:
/// `T(z) = T₁ + z/(z−1) e_n e_nᵀ − z T₃`.
#[derive(Clone, Debug)]
pub struct LoadedString {
    n: usize,
    terms: Vec<SumTerm>,
}

pub fn make_loaded_string(n: usize) -> Result<LoadedString> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("loaded string needs n >= 2, got {n}")));
    }
    let nf = n as f64;
    let last = n - 1;
    let re = |v: f64| Complex64::new(v, 0.0);

    let mut d1 = vec![re(2.0 * nf); n];
    d1[last] = re(nf);
    let t1 = CsrMatrix::tridiagonal(&vec![re(-nf); n - 1], &d1, &vec![re(-nf); n - 1]);

    let s = 1.0 / (6.0 * nf);
    let mut d3 = vec![re(4.0 * s); n];
    d3[last] = re(2.0 * s);
    let t3 = CsrMatrix::tridiagonal(&vec![re(s); n - 1], &d3, &vec![re(s); n - 1]);

    let load = CsrMatrix::from_triplets(n, n, &[(last, last, Complex64::ONE)])?;

    let terms = vec![
        SumTerm::new(t1, ScalarFunction::Constant { value: Complex64::ONE }),
        SumTerm::new(load, ScalarFunction::Rational { a: Complex64::ONE, b: re(-1.0) }),
        SumTerm::new(t3, ScalarFunction::Power { coeff: re(-1.0), exponent: 1 }),
    ];
    Ok(LoadedString { n, terms })
}

impl LoadedString {
    fn coefficient(&self, k: usize) -> &CsrMatrix {
        match self.terms[k].matrix.as_ref() {
            CoeffMatrix::Sparse(m) => m,
            CoeffMatrix::Dense(_) => unreachable!("string coefficients are sparse"),
        }
    }

    pub fn t1(&self) -> &CsrMatrix {
        self.coefficient(0)
    }

    pub fn t3(&self) -> &CsrMatrix {
        self.coefficient(2)
    }
}

impl NepProblem for LoadedString {
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
