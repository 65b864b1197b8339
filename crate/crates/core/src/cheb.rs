//! Chebyshev interpolation of matrix-valued functions on a real interval.
//!
//! A black-box `T(z)` is sampled at first-kind Chebyshev points and expanded
//! as `Σ_j P_j τ_j(m(z))`, with `m` the affine map of `[lo, hi]` onto `[−1, 1]`.
//! The expansion is then evaluated anywhere in the complex plane by Clenshaw's
//! recurrence.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::ComplexMatrix;
use crate::problems::functions::map_to_unit;

/// `P(z) = Σ_{j=0}^{d} P_j τ_j(m(z))`
#[derive(Clone, Debug)]
pub struct ChebyshevMatrixPoly {
    coeffs: Vec<ComplexMatrix>,
    lo: f64,
    hi: f64,
}

fn check_interval(lo: f64, hi: f64) -> Result<()> {
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::InvalidParameter(format!("chebyshev interval needs lo < hi, got [{lo}, {hi}]")));
    }
    Ok(())
}

fn angles(d: usize) -> Vec<f64> {
    (0..=d).map(|k| (k as f64 + 0.5) * PI / (d as f64 + 1.0)).collect()
}

/// The `d + 1` first-kind points `cos θ_k`, `θ_k = (k + ½)π/(d + 1)`, mapped to `[lo, hi]`.
pub fn chebyshev_nodes(d: usize, lo: f64, hi: f64) -> Result<Vec<f64>> {
    check_interval(lo, hi)?;
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    Ok(angles(d).into_iter().map(|t| mid + half * t.cos()).collect())
}

/// Interpolates `sampler` at the Chebyshev points. Samples are taken in parallel.
pub fn interpolate_matrix<F>(sampler: F, d: usize, lo: f64, hi: f64) -> Result<ChebyshevMatrixPoly>
where
    F: Fn(f64) -> Result<ComplexMatrix> + Sync,
{
    let nodes = chebyshev_nodes(d, lo, hi)?;
    let samples = nodes.par_iter().map(|&x| sampler(x)).collect::<Result<Vec<_>>>()?;
    ChebyshevMatrixPoly::from_samples(&samples, lo, hi)
}

/// Interpolates `Sᴴ T(x) S` without forming `T(x)`: `apply(x, S)` must return `T(x) S`.
pub fn reduce_interpolant<F>(apply: F, basis: &ComplexMatrix, d: usize, lo: f64, hi: f64) -> Result<ChebyshevMatrixPoly>
where
    F: Fn(f64, &ComplexMatrix) -> Result<ComplexMatrix> + Sync,
{
    interpolate_matrix(|x| Ok(basis.adjoint_mul(&apply(x, basis)?)), d, lo, hi)
}

impl ChebyshevMatrixPoly {
    /// Coefficients from samples at [`chebyshev_nodes`]`(d, lo, hi)`, `d = samples.len() − 1`.
    pub fn from_samples(samples: &[ComplexMatrix], lo: f64, hi: f64) -> Result<Self> {
        let first = samples
            .first()
            .ok_or_else(|| Error::InvalidParameter("chebyshev interpolation needs a sample".into()))?;
        let d = samples.len() - 1;
        check_interval(lo, hi)?;
        let (r, c) = (first.nrows(), first.ncols());
        if samples.iter().any(|s| s.nrows() != r || s.ncols() != c) {
            return Err(Error::DimensionMismatch("chebyshev samples differ in shape".into()));
        }
        let theta = angles(d);
        let coeffs = (0..=d)
            .map(|j| {
                let mut p = ComplexMatrix::zeros(r, c);
                for (s, &t) in samples.iter().zip(&theta) {
                    p.add_scaled(Complex64::new((j as f64 * t).cos(), 0.0), s);
                }
                // the mean term carries half the weight of the others
                let f = if j == 0 { 1.0 } else { 2.0 } / (d as f64 + 1.0);
                p.scaled(Complex64::new(f, 0.0))
            })
            .collect();
        Ok(Self { coeffs, lo, hi })
    }

    pub fn from_coefficients(coeffs: Vec<ComplexMatrix>, lo: f64, hi: f64) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidParameter("chebyshev polynomial needs a coefficient".into()));
        }
        check_interval(lo, hi)?;
        Ok(Self { coeffs, lo, hi })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }

    pub fn nrows(&self) -> usize {
        self.coeffs[0].nrows()
    }

    pub fn ncols(&self) -> usize {
        self.coeffs[0].ncols()
    }

    pub fn coefficients(&self) -> &[ComplexMatrix] {
        &self.coeffs
    }

    /// Clenshaw evaluation at complex `z`.
    pub fn evaluate(&self, z: Complex64) -> ComplexMatrix {
        let x = map_to_unit(z, self.lo, self.hi);
        let (r, c) = (self.nrows(), self.ncols());
        let mut b1 = ComplexMatrix::zeros(r, c);
        let mut b2 = ComplexMatrix::zeros(r, c);
        for p in self.coeffs[1..].iter().rev() {
            // b_j = P_j + 2x b_{j+1} − b_{j+2}
            let mut bj = p.clone();
            bj.add_scaled(x * 2.0, &b1);
            bj.add_scaled(-Complex64::ONE, &b2);
            b2 = b1;
            b1 = bj;
        }
        let mut out = self.coeffs[0].clone();
        out.add_scaled(x, &b1);
        out.add_scaled(-Complex64::ONE, &b2);
        out
    }

    /// Exact derivative `dP/dz`, one degree lower.
    pub fn derivative(&self) -> Self {
        let d = self.degree();
        let (r, c) = (self.nrows(), self.ncols());
        if d == 0 {
            return Self { coeffs: vec![ComplexMatrix::zeros(r, c)], lo: self.lo, hi: self.hi };
        }
        // c'_{j−1} = c'_{j+1} + 2j c_j, top down
        let mut dc = vec![ComplexMatrix::zeros(r, c); d + 2];
        for j in (1..=d).rev() {
            let mut v = dc[j + 1].clone();
            v.add_scaled(Complex64::new(2.0 * j as f64, 0.0), &self.coeffs[j]);
            dc[j - 1] = v;
        }
        dc.truncate(d);
        let scale = 2.0 / (self.hi - self.lo);
        dc[0] = dc[0].scaled(Complex64::new(0.5, 0.0));
        let coeffs = dc.into_iter().map(|m| m.scaled(Complex64::new(scale, 0.0))).collect();
        Self { coeffs, lo: self.lo, hi: self.hi }
    }

    /// `Sᴴ P_j S` for every coefficient.
    pub fn project(&self, basis: &ComplexMatrix) -> Self {
        let coeffs = self.coeffs.iter().map(|p| basis.adjoint_mul(&p.matmul(basis))).collect();
        Self { coeffs, lo: self.lo, hi: self.hi }
    }

    /// Drops trailing coefficients with `‖P_j‖_F ≤ tol · max_k ‖P_k‖_F`; `P_0` is always kept.
    pub fn chopped(&self, tol: f64) -> Self {
        let norms: Vec<f64> = self.coeffs.iter().map(|p| p.norm_fro()).collect();
        let max = norms.iter().cloned().fold(0.0, f64::max);
        let keep = norms.iter().rposition(|&n| n > tol * max).map_or(1, |j| j + 1);
        Self { coeffs: self.coeffs[..keep].to_vec(), lo: self.lo, hi: self.hi }
    }

    /// `‖P_d‖_F / max_j ‖P_j‖_F`; values far above roundoff signal an under-resolved degree.
    pub fn tail_ratio(&self) -> f64 {
        let norms: Vec<f64> = self.coeffs.iter().map(|p| p.norm_fro()).collect();
        let max = norms.iter().cloned().fold(0.0, f64::max);
        if max == 0.0 {
            0.0
        } else {
            norms[norms.len() - 1] / max
        }
    }
}
