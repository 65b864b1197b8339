use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Complex tridiagonal matrix stored by bands.
#[derive(Clone, Debug)]
pub struct Tridiagonal {
    pub lower: Vec<Complex64>,
    pub diag: Vec<Complex64>,
    pub upper: Vec<Complex64>,
}

impl Tridiagonal {
    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        let n = self.dim();
        let mut out = ComplexMatrix::zeros(n, x.ncols());
        for c in 0..x.ncols() {
            let xc = x.col(c);
            let oc = out.col_mut(c);
            for i in 0..n {
                let mut acc = self.diag[i] * xc[i];
                if i > 0 {
                    acc += self.lower[i - 1] * xc[i - 1];
                }
                if i + 1 < n {
                    acc += self.upper[i] * xc[i + 1];
                }
                oc[i] = acc;
            }
        }
        out
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = self.diag[i];
            if i + 1 < n {
                m[(i + 1, i)] = self.lower[i];
                m[(i, i + 1)] = self.upper[i];
            }
        }
        m
    }

    /// Gaussian elimination with partial pivoting (the `gtsv` scheme).
    /// A pivot below `eps · max|entry|` is reported as singular.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim();
        if b.nrows() != n {
            return Err(Error::DimensionMismatch(format!("rhs has {} rows, matrix is {n}x{n}", b.nrows())));
        }
        let scale = self
            .diag
            .iter()
            .chain(&self.lower)
            .chain(&self.upper)
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        let tiny = f64::EPSILON * scale;
        let singular = |pivot: usize, v: Complex64| Error::SingularMatrix { pivot, magnitude: v.norm() };

        let mut d = self.diag.clone();
        let mut du = self.upper.clone();
        let mut dl = self.lower.clone();
        // second superdiagonal created by row swaps
        let mut du2 = vec![Complex64::ZERO; n.saturating_sub(2)];
        let mut x = b.clone();
        let k = b.ncols();

        for i in 0..n.saturating_sub(1) {
            if d[i].norm() >= dl[i].norm() {
                if d[i].norm() <= tiny {
                    return Err(singular(i, d[i]));
                }
                let fact = dl[i] / d[i];
                d[i + 1] -= fact * du[i];
                for c in 0..k {
                    let col = x.col_mut(c);
                    let bi = col[i];
                    col[i + 1] -= fact * bi;
                }
                dl[i] = Complex64::ZERO;
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                let temp = d[i + 1];
                d[i + 1] = du[i] - fact * temp;
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du2[i];
                }
                du[i] = temp;
                for c in 0..k {
                    let col = x.col_mut(c);
                    let bi = col[i];
                    col[i] = col[i + 1];
                    col[i + 1] = bi - fact * col[i + 1];
                }
            }
        }
        if d[n - 1].norm() <= tiny {
            return Err(singular(n - 1, d[n - 1]));
        }
        for c in 0..k {
            let col = x.col_mut(c);
            col[n - 1] /= d[n - 1];
            if n > 1 {
                col[n - 2] = (col[n - 2] - du[n - 2] * col[n - 1]) / d[n - 2];
            }
            for i in (0..n.saturating_sub(2)).rev() {
                col[i] = (col[i] - du[i] * col[i + 1] - du2[i] * col[i + 2]) / d[i];
            }
        }
        if !x.is_finite() {
            return Err(Error::SingularMatrix { pivot: n, magnitude: 0.0 });
        }
        Ok(x)
    }
}

/// Bands of `Σ_j f_j(z) T_j` for sparse terms whose pattern lies within the tridiagonal band.
pub(crate) fn tridiagonal_from_terms(
    terms: &[super::SumTerm],
    n: usize,
    z: Complex64,
) -> Result<Tridiagonal> {
    let mut t = Tridiagonal {
        lower: vec![Complex64::ZERO; n - 1],
        diag: vec![Complex64::ZERO; n],
        upper: vec![Complex64::ZERO; n - 1],
    };
    for term in terms {
        let f = term.function.eval(z)?;
        let super::CoeffMatrix::Sparse(m) = term.matrix.as_ref() else {
            return Err(Error::InvalidParameter("tridiagonal assembly needs sparse terms".into()));
        };
        for (i, j, v) in m.triplets() {
            match j as isize - i as isize {
                0 => t.diag[i] += f * v,
                1 => t.upper[i] += f * v,
                -1 => t.lower[j] += f * v,
                _ => return Err(Error::InvalidParameter(format!("entry ({i}, {j}) outside the band"))),
            }
        }
    }
    Ok(t)
}
