//! Dense complex linear algebra used throughout the solver.
//!
//! [`ComplexMatrix`] is a thin owner of a column-major `faer` matrix. The
//! factorizations themselves (partial-pivot LU, SVD, non-Hermitian
//! eigendecomposition) are delegated to `faer`; this module fixes the
//! contracts the rest of the crate relies on: singular pivots become
//! [`Error::SingularMatrix`], singular values come back nonincreasing, and
//! eigenvectors come back with unit 2-norm.

use std::ops::{Index, IndexMut, Range};

use faer::linalg::solvers::{DenseSolveCore, Solve};
use faer::{Mat, MatRef};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix, column-major.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix(Mat<Complex64>);

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(Mat::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(Mat::identity(n, n))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> Complex64) -> Self {
        Self(Mat::from_fn(rows, cols, f))
    }

    /// Builds a matrix from row slices. Panics on ragged input.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Self {
        let ncols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == ncols), "ragged rows");
        Self::from_fn(rows.len(), ncols, |i, j| rows[i][j])
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { Complex64::ZERO })
    }

    /// Single column matrix.
    pub fn from_column(col: &[Complex64]) -> Self {
        Self::from_fn(col.len(), 1, |i, _| col[i])
    }

    pub fn from_faer(mat: Mat<Complex64>) -> Self {
        Self(mat)
    }

    pub fn as_faer(&self) -> MatRef<'_, Complex64> {
        self.0.as_ref()
    }

    pub fn into_faer(self) -> Mat<Complex64> {
        self.0
    }

    pub fn nrows(&self) -> usize {
        self.0.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.nrows() == self.ncols()
    }

    pub fn col(&self, j: usize) -> &[Complex64] {
        self.0.col_as_slice(j)
    }

    pub fn col_mut(&mut self, j: usize) -> &mut [Complex64] {
        self.0.col_as_slice_mut(j)
    }

    /// Copy of the columns in `range`.
    pub fn columns(&self, range: Range<usize>) -> Self {
        Self(self.0.subcols(range.start, range.len()).to_owned())
    }

    pub fn block(&self, row0: usize, col0: usize, rows: usize, cols: usize) -> Self {
        Self(self.0.submatrix(row0, col0, rows, cols).to_owned())
    }

    pub fn set_block(&mut self, row0: usize, col0: usize, block: &ComplexMatrix) {
        self.0
            .submatrix_mut(row0, col0, block.nrows(), block.ncols())
            .copy_from(block.0.as_ref());
    }

    /// Horizontal concatenation. All blocks must share the row count.
    pub fn hstack(blocks: &[ComplexMatrix]) -> Result<Self> {
        let rows = blocks.first().map_or(0, Self::nrows);
        if blocks.iter().any(|b| b.nrows() != rows) {
            return Err(Error::DimensionMismatch("hstack blocks differ in row count".into()));
        }
        let cols = blocks.iter().map(Self::ncols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut offset = 0;
        for b in blocks {
            out.set_block(0, offset, b);
            offset += b.ncols();
        }
        Ok(out)
    }

    pub fn matmul(&self, rhs: &ComplexMatrix) -> Self {
        assert_eq!(self.ncols(), rhs.nrows(), "matmul shape mismatch");
        Self(&self.0 * &rhs.0)
    }

    /// `selfᴴ · rhs` without forming the adjoint explicitly.
    pub fn adjoint_mul(&self, rhs: &ComplexMatrix) -> Self {
        assert_eq!(self.nrows(), rhs.nrows(), "adjoint_mul shape mismatch");
        Self(self.0.adjoint() * &rhs.0)
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint().to_owned())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose().to_owned())
    }

    /// `self += alpha * other`
    pub fn add_scaled(&mut self, alpha: Complex64, other: &ComplexMatrix) {
        assert_eq!(
            (self.nrows(), self.ncols()),
            (other.nrows(), other.ncols()),
            "add_scaled shape mismatch"
        );
        for j in 0..self.ncols() {
            let src = other.col(j);
            for (dst, s) in self.col_mut(j).iter_mut().zip(src) {
                *dst += alpha * s;
            }
        }
    }

    pub fn scaled(&self, alpha: Complex64) -> Self {
        Self::from_fn(self.nrows(), self.ncols(), |i, j| alpha * self[(i, j)])
    }

    pub fn sub(&self, other: &ComplexMatrix) -> Self {
        let mut out = self.clone();
        out.add_scaled(Complex64::new(-1.0, 0.0), other);
        out
    }

    /// Frobenius norm.
    pub fn norm_fro(&self) -> f64 {
        self.0.norm_l2()
    }

    /// Largest entry magnitude.
    pub fn norm_max(&self) -> f64 {
        self.0.norm_max()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_all_finite()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.nrows().min(self.ncols())).map(|i| self[(i, i)]).sum()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.0[(i, j)]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.0[(i, j)]
    }
}

/// Euclidean norm of a complex vector.
pub fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Thin singular value decomposition `A = U diag(σ) Vᴴ`.
#[derive(Clone, Debug)]
pub struct SvdResult {
    pub u: ComplexMatrix,
    pub singular_values: Vec<f64>,
    pub v: ComplexMatrix,
}

/// Eigenvalues with unit-norm eigenvectors stored column-wise.
#[derive(Clone, Debug)]
pub struct EigResult {
    pub values: Vec<Complex64>,
    pub vectors: ComplexMatrix,
}

/// Partial-pivot LU factorization kept for repeated solves.
pub struct LuFactor {
    lu: faer::linalg::solvers::PartialPivLu<Complex64>,
    n: usize,
}

impl LuFactor {
    /// Factors `a`. Fails with [`Error::SingularMatrix`] when a pivot is
    /// below `eps · max|a_ij|`, i.e. when `a` is singular to working precision.
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!(
                "LU needs a square matrix, got {}x{}",
                a.nrows(),
                a.ncols()
            )));
        }
        if !a.is_finite() {
            return Err(Error::InvalidParameter("matrix has non-finite entries".into()));
        }
        let n = a.nrows();
        let lu = a.as_faer().partial_piv_lu();
        let threshold = f64::EPSILON * a.norm_max();
        let u = lu.U();
        for i in 0..n {
            let magnitude = u[(i, i)].norm();
            if magnitude <= threshold || !magnitude.is_finite() {
                return Err(Error::SingularMatrix { pivot: i, magnitude });
            }
        }
        Ok(Self { lu, n })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        if b.nrows() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "rhs has {} rows, matrix is {}x{}",
                b.nrows(),
                self.n,
                self.n
            )));
        }
        let x = ComplexMatrix(self.lu.solve(b.as_faer()));
        if !x.is_finite() {
            return Err(Error::SingularMatrix { pivot: self.n, magnitude: 0.0 });
        }
        Ok(x)
    }

    pub fn inverse(&self) -> ComplexMatrix {
        ComplexMatrix(self.lu.inverse())
    }
}

/// Solves `A X = B` by LU with partial pivoting.
pub fn solve_dense(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    LuFactor::new(a)?.solve(b)
}

/// Thin SVD with nonincreasing singular values.
pub fn svd(a: &ComplexMatrix) -> Result<SvdResult> {
    let dec = a
        .as_faer()
        .thin_svd()
        .map_err(|e| Error::ConvergenceFailure(format!("svd: {e:?}")))?;
    let singular_values: Vec<f64> = dec.S().column_vector().iter().map(|s| s.re).collect();
    Ok(SvdResult {
        u: ComplexMatrix(dec.U().to_owned()),
        singular_values,
        v: ComplexMatrix(dec.V().to_owned()),
    })
}

/// Singular values only, nonincreasing.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    a.as_faer()
        .singular_values()
        .map_err(|e| Error::ConvergenceFailure(format!("svd: {e:?}")))
}

/// Count of singular values at or above `tol · σ₁`.
pub fn numerical_rank(singular_values: &[f64], tol: f64) -> usize {
    match singular_values.first() {
        Some(&s1) if s1 > 0.0 => singular_values.iter().take_while(|&&s| s >= tol * s1).count(),
        _ => 0,
    }
}

/// Eigendecomposition of a general square complex matrix.
pub fn eig_dense(a: &ComplexMatrix) -> Result<EigResult> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "eig needs a square matrix, got {}x{}",
            a.nrows(),
            a.ncols()
        )));
    }
    let dec = a
        .as_faer()
        .eigen()
        .map_err(|e| Error::ConvergenceFailure(format!("eig: {e:?}")))?;
    let values: Vec<Complex64> = dec.S().column_vector().iter().copied().collect();
    let mut vectors = ComplexMatrix(dec.U().to_owned());
    for j in 0..vectors.ncols() {
        let col = vectors.col_mut(j);
        let norm = vec_norm(col);
        if norm > 0.0 {
            col.iter_mut().for_each(|x| *x /= norm);
        }
    }
    Ok(EigResult { values, vectors })
}
