use faer::sparse::{SparseColMat, Triplet};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;

/// Compressed sparse row matrix. Duplicate entries are summed on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct CsrMatrix {
    rows: usize,
    cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<Complex64>,
}

impl CsrMatrix {
    pub fn from_triplets(rows: usize, cols: usize, triplets: &[(usize, usize, Complex64)]) -> Result<Self> {
        if let Some(&(i, j, _)) = triplets.iter().find(|(i, j, _)| *i >= rows || *j >= cols) {
            return Err(Error::DimensionMismatch(format!(
                "entry ({i}, {j}) outside a {rows}x{cols} matrix"
            )));
        }
        let mut sorted = triplets.to_vec();
        sorted.sort_by_key(|&(i, j, _)| (i, j));
        let mut row_ptr = vec![0usize; rows + 1];
        let mut col_idx = Vec::with_capacity(sorted.len());
        let mut values: Vec<Complex64> = Vec::with_capacity(sorted.len());
        let mut last: Option<(usize, usize)> = None;
        for (i, j, v) in sorted {
            if last == Some((i, j)) {
                *values.last_mut().unwrap() += v;
                continue;
            }
            last = Some((i, j));
            row_ptr[i + 1] += 1;
            col_idx.push(j);
            values.push(v);
        }
        for i in 0..rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        Ok(Self { rows, cols, row_ptr, col_idx, values })
    }

    pub fn from_dense(m: &ComplexMatrix) -> Self {
        let mut t = Vec::new();
        for j in 0..m.ncols() {
            for (i, &v) in m.col(j).iter().enumerate() {
                if v != Complex64::ZERO {
                    t.push((i, j, v));
                }
            }
        }
        Self::from_triplets(m.nrows(), m.ncols(), &t).expect("indices in range")
    }

    /// Tridiagonal matrix from its three bands.
    pub fn tridiagonal(lower: &[Complex64], diag: &[Complex64], upper: &[Complex64]) -> Self {
        let n = diag.len();
        assert!(lower.len() + 1 == n && upper.len() + 1 == n);
        let mut t = Vec::with_capacity(3 * n);
        for i in 0..n {
            if i > 0 {
                t.push((i, i - 1, lower[i - 1]));
            }
            t.push((i, i, diag[i]));
            if i + 1 < n {
                t.push((i, i + 1, upper[i]));
            }
        }
        Self::from_triplets(n, n, &t).expect("indices in range")
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let range = self.row_ptr[i]..self.row_ptr[i + 1];
        match self.col_idx[range.clone()].binary_search(&j) {
            Ok(k) => self.values[range.start + k],
            Err(_) => Complex64::ZERO,
        }
    }

    pub fn triplets(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.rows).flat_map(move |i| {
            (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.col_idx[k], self.values[k]))
        })
    }

    pub fn mul_dense(&self, x: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.cols, x.nrows(), "sparse matmul shape mismatch");
        let mut out = ComplexMatrix::zeros(self.rows, x.ncols());
        for c in 0..x.ncols() {
            let xc = x.col(c);
            let oc = out.col_mut(c);
            for (i, o) in oc.iter_mut().enumerate() {
                let mut acc = Complex64::ZERO;
                for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                    acc += self.values[k] * xc[self.col_idx[k]];
                }
                *o = acc;
            }
        }
        out
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.rows, self.cols);
        for (i, j, v) in self.triplets() {
            out[(i, j)] = v;
        }
        out
    }
}

/// Coefficient matrix of a sum-form problem.
#[derive(Clone, Debug, PartialEq)]
pub enum CoeffMatrix {
    Dense(ComplexMatrix),
    Sparse(CsrMatrix),
}

impl CoeffMatrix {
    pub fn nrows(&self) -> usize {
        match self {
            CoeffMatrix::Dense(m) => m.nrows(),
            CoeffMatrix::Sparse(m) => m.nrows(),
        }
    }

    pub fn ncols(&self) -> usize {
        match self {
            CoeffMatrix::Dense(m) => m.ncols(),
            CoeffMatrix::Sparse(m) => m.ncols(),
        }
    }

    pub fn mul_dense(&self, x: &ComplexMatrix) -> ComplexMatrix {
        match self {
            CoeffMatrix::Dense(m) => m.matmul(x),
            CoeffMatrix::Sparse(m) => m.mul_dense(x),
        }
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        match self {
            CoeffMatrix::Dense(m) => m.clone(),
            CoeffMatrix::Sparse(m) => m.to_dense(),
        }
    }

    pub fn norm_fro(&self) -> f64 {
        match self {
            CoeffMatrix::Dense(m) => m.norm_fro(),
            CoeffMatrix::Sparse(m) => m.triplets().map(|(_, _, v)| v.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    /// `target += alpha * self`
    pub fn add_scaled_into(&self, alpha: Complex64, target: &mut ComplexMatrix) {
        match self {
            CoeffMatrix::Dense(m) => target.add_scaled(alpha, m),
            CoeffMatrix::Sparse(m) => {
                for (i, j, v) in m.triplets() {
                    target[(i, j)] += alpha * v;
                }
            }
        }
    }
}

impl From<ComplexMatrix> for CoeffMatrix {
    fn from(m: ComplexMatrix) -> Self {
        CoeffMatrix::Dense(m)
    }
}

impl From<CsrMatrix> for CoeffMatrix {
    fn from(m: CsrMatrix) -> Self {
        CoeffMatrix::Sparse(m)
    }
}

/// Sparse LU solve of `Σ_j alpha_j A_j`, all `A_j` sparse.
pub(crate) fn sparse_combination_solve(
    n: usize,
    parts: &[(Complex64, &CsrMatrix)],
    rhs: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    use faer::linalg::solvers::Solve;

    let mut entries = Vec::new();
    let mut scale = 0.0f64;
    for (alpha, m) in parts {
        for (i, j, v) in m.triplets() {
            let val = *alpha * v;
            scale = scale.max(val.norm());
            entries.push((i, j, val));
        }
    }
    // sum duplicates before handing the pattern to faer
    let combined = CsrMatrix::from_triplets(n, n, &entries)?;
    let triplets: Vec<Triplet<usize, usize, Complex64>> =
        combined.triplets().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
    let mat = SparseColMat::<usize, Complex64>::try_new_from_triplets(n, n, &triplets)
        .map_err(|e| Error::InvalidParameter(format!("sparse assembly: {e:?}")))?;
    let lu = mat
        .sp_lu()
        .map_err(|_| Error::SingularMatrix { pivot: 0, magnitude: 0.0 })?;
    let x = ComplexMatrix::from_faer(lu.solve(rhs.as_faer()));
    if !x.is_finite() {
        return Err(Error::SingularMatrix { pivot: 0, magnitude: 0.0 });
    }
    // a residual far above roundoff means a zero pivot slipped through
    let r = combined.mul_dense(&x).sub(rhs).norm_fro();
    if r > 1e-6 * (rhs.norm_fro() + scale * x.norm_fro()) {
        return Err(Error::SingularMatrix { pivot: 0, magnitude: r });
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn duplicates_are_summed() {
        let m = CsrMatrix::from_triplets(2, 2, &[(0, 0, c(1.0)), (1, 1, c(2.0)), (0, 0, c(3.0))]).unwrap();
        assert_eq!(m.get(0, 0), c(4.0));
        assert_eq!(m.get(0, 1), c(0.0));
        assert_eq!(m.nnz(), 2);
    }

    #[test]
    fn out_of_range_entry_rejected() {
        assert!(CsrMatrix::from_triplets(2, 2, &[(2, 0, c(1.0))]).is_err());
    }

    #[test]
    fn sparse_and_dense_products_agree() {
        let t = CsrMatrix::tridiagonal(&[c(-1.0), c(-1.0)], &[c(2.0), c(2.0), c(2.0)], &[c(-1.0), c(-1.0)]);
        let x = ComplexMatrix::from_fn(3, 2, |i, j| Complex64::new(i as f64, j as f64 + 1.0));
        assert_eq!(t.mul_dense(&x), t.to_dense().matmul(&x));
        assert_eq!(CsrMatrix::from_dense(&t.to_dense()), t);
    }

    #[test]
    fn sparse_solve_matches_dense() {
        let a = CsrMatrix::tridiagonal(&[c(-1.0); 4], &[c(3.0); 5], &[c(-1.0); 4]);
        let b = CsrMatrix::from_triplets(5, 5, &[(4, 4, c(1.0))]).unwrap();
        let alpha = Complex64::new(0.5, 2.0);
        let rhs = ComplexMatrix::from_fn(5, 2, |i, j| Complex64::new(i as f64 + 1.0, j as f64));
        let x = sparse_combination_solve(5, &[(c(1.0), &a), (alpha, &b)], &rhs).unwrap();
        let mut dense = a.to_dense();
        dense.add_scaled(alpha, &b.to_dense());
        let y = crate::linalg::solve_dense(&dense, &rhs).unwrap();
        assert!(x.sub(&y).norm_fro() < 1e-12);
    }
}
