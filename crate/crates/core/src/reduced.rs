//! Block Sakurai-Sugiura solver for the projected problem `T_S(λ) g = 0`.
//!
//! Moments `A_α = (1/2πi) ∮ ((z − γ)/ρ)^α T_S(z)⁻¹ dz` are accumulated over
//! the quadrature nodes, the Hankel pencil `(H^<, H)` is reduced by an SVD of
//! `H`, and the resulting small eigenproblem is mapped back to `λ` and `g`.
//! The eigenvalue count comes from both the winding number of `det T_S` and
//! the largest gap in the singular values of `H`.

use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cheb::ChebyshevMatrixPoly;
use crate::contour::{Contour, QuadratureSet};
use crate::error::{Error, Result};
use crate::linalg::{eig_dense, svd, vec_norm, ComplexMatrix, LuFactor, SvdResult};
use crate::problems::{CoeffMatrix, ScalarFunction, SumTerm};

/// Nodes handled per partial sum. Fixed so results do not depend on the thread count.
const NODE_CHUNK: usize = 32;

/// Smallest admissible `σ_count / σ₁` of the Hankel matrix.
const RANK_FLOOR: f64 = 1e-15;

/// Distance from an integer beyond which the winding number is rejected.
const WINDING_SLACK: f64 = 0.1;

/// The projected problem.
#[derive(Clone, Debug)]
pub enum ReducedNep {
    /// `Σ_j (Sᴴ T_j S) f_j(z)`
    Sum { terms: Vec<(ComplexMatrix, ScalarFunction)> },
    /// Chebyshev interpolant of `Sᴴ T(z) S` and its exact derivative.
    Chebyshev { poly: ChebyshevMatrixPoly, derivative: ChebyshevMatrixPoly },
}

impl ReducedNep {
    /// Projects every coefficient once; terms that share a matrix share the projection.
    pub fn from_sum_terms(terms: &[SumTerm], basis: &ComplexMatrix) -> Result<Self> {
        let mut distinct: Vec<Arc<CoeffMatrix>> = Vec::new();
        let mut slot = Vec::with_capacity(terms.len());
        for t in terms {
            match distinct.iter().position(|m| Arc::ptr_eq(m, &t.matrix)) {
                Some(k) => slot.push(k),
                None => {
                    slot.push(distinct.len());
                    distinct.push(t.matrix.clone());
                }
            }
        }
        if let Some(m) = distinct.iter().find(|m| m.nrows() != basis.nrows()) {
            return Err(Error::DimensionMismatch(format!(
                "basis has {} rows, coefficient is {}x{}",
                basis.nrows(),
                m.nrows(),
                m.ncols()
            )));
        }
        let projected: Vec<ComplexMatrix> =
            distinct.par_iter().map(|m| basis.adjoint_mul(&m.mul_dense(basis))).collect();
        let terms = terms
            .iter()
            .zip(slot)
            .map(|(t, k)| (projected[k].clone(), t.function.clone()))
            .collect();
        Self::from_terms(terms)
    }

    pub fn from_terms(terms: Vec<(ComplexMatrix, ScalarFunction)>) -> Result<Self> {
        let k = terms
            .first()
            .map(|t| t.0.nrows())
            .ok_or_else(|| Error::InvalidParameter("reduced problem needs at least one term".into()))?;
        if terms.iter().any(|(m, _)| m.nrows() != k || m.ncols() != k) {
            return Err(Error::DimensionMismatch("reduced coefficients differ in shape".into()));
        }
        Ok(ReducedNep::Sum { terms })
    }

    pub fn from_chebyshev(poly: ChebyshevMatrixPoly) -> Result<Self> {
        if poly.nrows() != poly.ncols() {
            return Err(Error::DimensionMismatch("reduced interpolant must be square".into()));
        }
        let derivative = poly.derivative();
        Ok(ReducedNep::Chebyshev { poly, derivative })
    }

    pub fn dim(&self) -> usize {
        match self {
            ReducedNep::Sum { terms } => terms[0].0.nrows(),
            ReducedNep::Chebyshev { poly, .. } => poly.nrows(),
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<ComplexMatrix> {
        match self {
            ReducedNep::Sum { terms } => {
                let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
                for (m, f) in terms {
                    out.add_scaled(f.eval(z)?, m);
                }
                Ok(out)
            }
            ReducedNep::Chebyshev { poly, .. } => Ok(poly.evaluate(z)),
        }
    }

    pub fn derivative(&self, z: Complex64) -> Result<ComplexMatrix> {
        match self {
            ReducedNep::Sum { terms } => {
                let mut out = ComplexMatrix::zeros(self.dim(), self.dim());
                for (m, f) in terms {
                    out.add_scaled(f.derivative(z)?, m);
                }
                Ok(out)
            }
            ReducedNep::Chebyshev { derivative, .. } => Ok(derivative.evaluate(z)),
        }
    }

    /// `‖T_S(λ) g‖ / ‖g‖`
    pub fn residual(&self, lambda: Complex64, g: &[Complex64]) -> Result<f64> {
        let t = self.eval(lambda)?;
        let r = t.matmul(&ComplexMatrix::from_column(g));
        Ok(vec_norm(r.col(0)) / vec_norm(g))
    }
}

/// Scaled moments `A_0 … A_{2K−1}`.
#[derive(Clone, Debug)]
pub struct MomentSet {
    pub moments: Vec<ComplexMatrix>,
    pub center: Complex64,
    pub scale: f64,
    pub nodes: usize,
    pub blocks: usize,
}

/// Moments plus the winding-number quadrature `Σ_j w_j tr(T_S(z_j)⁻¹ T_S′(z_j))`.
#[derive(Clone, Debug)]
pub struct NodePass {
    pub moments: MomentSet,
    pub winding: Complex64,
    pub perturbed: Vec<usize>,
}

fn invert_at(t: &ReducedNep, z: Complex64) -> Result<(ComplexMatrix, Complex64)> {
    let lu = LuFactor::new(&t.eval(z)?)?;
    let trace = lu.solve(&t.derivative(z)?)?.trace();
    Ok((lu.inverse(), trace))
}

/// One pass over the quadrature nodes: dense inversion of `T_S` at each node.
/// A singular node is moved once along the tangent before failing.
pub fn reduced_moments(
    t: &ReducedNep,
    quad: &QuadratureSet,
    center: Complex64,
    scale: f64,
    blocks: usize,
) -> Result<NodePass> {
    if blocks == 0 {
        return Err(Error::InvalidParameter("rsrr.K: must be >= 1".into()));
    }
    if quad.len() < 2 * blocks {
        return Err(Error::InvalidParameter(format!(
            "rsrr.N_S: {} nodes cannot resolve {} moments",
            quad.len(),
            2 * blocks
        )));
    }
    let k = t.dim();
    let count = 2 * blocks;
    let indices: Vec<usize> = (0..quad.len()).collect();
    let partials = indices
        .par_chunks(NODE_CHUNK)
        .map(|chunk| {
            let mut acc = vec![ComplexMatrix::zeros(k, k); count];
            let mut winding = Complex64::ZERO;
            let mut moved = Vec::new();
            for &j in chunk {
                let z0 = quad.nodes[j];
                let (z, (inv, trace)) = match invert_at(t, z0) {
                    Ok(r) => (z0, r),
                    Err(Error::SingularMatrix { .. }) => {
                        let z1 = quad.perturbed_node(j);
                        log::warn!("reduced matrix singular at node {j} (z = {z0}); retrying at {z1}");
                        moved.push(j);
                        let r = invert_at(t, z1).map_err(|e| match e {
                            Error::SingularMatrix { .. } => Error::SingularReduced { index: j, z: z1 },
                            other => other,
                        })?;
                        (z1, r)
                    }
                    Err(e) => return Err(e),
                };
                let x = (z - center) / scale;
                let w = quad.weights[j];
                let mut coeff = w;
                for a in acc.iter_mut() {
                    a.add_scaled(coeff, &inv);
                    coeff *= x;
                }
                winding += w * trace;
            }
            Ok((acc, winding, moved))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut moments = vec![ComplexMatrix::zeros(k, k); count];
    let mut winding = Complex64::ZERO;
    let mut perturbed = Vec::new();
    for (acc, w, moved) in partials {
        for (m, a) in moments.iter_mut().zip(&acc) {
            m.add_scaled(Complex64::ONE, a);
        }
        winding += w;
        perturbed.extend(moved);
    }
    Ok(NodePass {
        moments: MomentSet { moments, center, scale, nodes: quad.len(), blocks },
        winding,
        perturbed,
    })
}

/// `H = [A_{i+j}]`, `H^< = [A_{i+j+1}]`, `i, j = 0 … K−1`.
pub fn hankel_pencil(m: &MomentSet) -> (ComplexMatrix, ComplexMatrix) {
    let k = m.moments[0].nrows();
    let size = m.blocks * k;
    let mut h = ComplexMatrix::zeros(size, size);
    let mut hs = ComplexMatrix::zeros(size, size);
    for i in 0..m.blocks {
        for j in 0..m.blocks {
            h.set_block(i * k, j * k, &m.moments[i + j]);
            hs.set_block(i * k, j * k, &m.moments[i + j + 1]);
        }
    }
    (h, hs)
}

/// How the eigenvalue count was settled.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CountStrategy {
    /// Winding number and gap agree.
    Agreed,
    /// Winding number not near an integer; gap accepted.
    Gap,
    /// No gap above `tol_gap`; winding number used.
    Winding,
    /// Both valid but different; the candidate with smaller residuals wins.
    ResolvedByResidual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigencountReport {
    /// Real part of the winding quadrature before rounding.
    pub winding: f64,
    pub winding_imag: f64,
    pub winding_rounded: i64,
    /// Count suggested by the largest singular value gap (`σ_j / σ_{j+1}` maximal at `j`).
    pub gap_index: Option<usize>,
    pub gap_ratio: f64,
    pub chosen: usize,
    pub strategy: CountStrategy,
    /// Counts still in play before residual comparison.
    pub candidates: Vec<usize>,
}

/// Combines the winding number with the singular value gap of `H`.
///
/// The gap is searched among `σ_j ≥ 1e-15 σ₁`; smaller values could not be
/// used for extraction anyway. With two valid but different counts, both are
/// returned as candidates and `chosen` holds the gap count until resolved.
pub fn count_eigenvalues(winding: Complex64, hankel_sv: &[f64], tol_gap: f64) -> Result<EigencountReport> {
    let rounded = winding.re.round();
    let integer = (winding.re - rounded).abs() <= WINDING_SLACK && rounded >= 0.0;

    let s1 = hankel_sv.first().copied().unwrap_or(0.0);
    let mut gap_index = None;
    let mut gap_ratio = 0.0f64;
    if s1 > 0.0 {
        for j in 0..hankel_sv.len().saturating_sub(1) {
            if hankel_sv[j] < RANK_FLOOR * s1 {
                break;
            }
            let ratio = if hankel_sv[j + 1] > 0.0 { hankel_sv[j] / hankel_sv[j + 1] } else { f64::INFINITY };
            if ratio > gap_ratio {
                gap_ratio = ratio;
                gap_index = Some(j + 1);
            }
        }
    }
    let gap_ok = gap_index.is_some() && gap_ratio >= tol_gap;
    let wind = rounded as usize;

    let (chosen, strategy, candidates) = match (gap_ok, integer) {
        (true, true) if gap_index == Some(wind) => (wind, CountStrategy::Agreed, vec![wind]),
        (true, true) => {
            let g = gap_index.unwrap();
            (g, CountStrategy::ResolvedByResidual, vec![g, wind])
        }
        (true, false) => (gap_index.unwrap(), CountStrategy::Gap, vec![gap_index.unwrap()]),
        (false, true) => (wind, CountStrategy::Winding, vec![wind]),
        (false, false) => return Err(Error::NonIntegerWinding { value: winding.re }),
    };
    Ok(EigencountReport {
        winding: winding.re,
        winding_imag: winding.im,
        winding_rounded: rounded as i64,
        gap_index,
        gap_ratio,
        chosen,
        strategy,
        candidates,
    })
}

/// One eigenpair of the projected problem.
#[derive(Clone, Debug)]
pub struct ReducedPair {
    pub value: Complex64,
    /// Unit 2-norm.
    pub vector: Vec<Complex64>,
    pub residual: f64,
}

/// Eigenpairs from the pencil; exterior Ritz values are returned separately.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub pairs: Vec<(Complex64, Vec<Complex64>)>,
    pub discarded: Vec<Complex64>,
}

/// `A = V₀ᴴ H^< W₀ Σ₀⁻¹`, `λ = ρ λ′ + γ`, `g = H_r W₀ Σ₀⁻¹ g′` with `H_r = [A_0 … A_{K−1}]`.
pub fn extract_eigenpairs(
    m: &MomentSet,
    h_shift: &ComplexMatrix,
    h_svd: &SvdResult,
    count: usize,
    contour: &Contour,
) -> Result<Extraction> {
    if count == 0 {
        return Ok(Extraction { pairs: Vec::new(), discarded: Vec::new() });
    }
    let sv = &h_svd.singular_values;
    if count > sv.len() {
        return Err(Error::InvalidParameter(format!(
            "eigenvalue count {count} exceeds the Hankel dimension {}",
            sv.len()
        )));
    }
    let ratio = if sv[0] > 0.0 { sv[count - 1] / sv[0] } else { 0.0 };
    if ratio < RANK_FLOOR {
        return Err(Error::RankCollapse { count, ratio });
    }
    let v0 = h_svd.u.columns(0..count);
    let inv_sigma: Vec<Complex64> = sv[..count].iter().map(|&s| Complex64::new(1.0 / s, 0.0)).collect();
    let w0s = h_svd.v.columns(0..count).matmul(&ComplexMatrix::from_diagonal(&inv_sigma));
    let a = v0.adjoint_mul(&h_shift.matmul(&w0s));
    let eig = eig_dense(&a)?;

    let k = m.moments[0].nrows();
    let hr = ComplexMatrix::hstack(&m.moments[..m.blocks])?;
    debug_assert_eq!(hr.nrows(), k);
    let g = hr.matmul(&w0s).matmul(&eig.vectors);

    let margin = 1e-10 * contour.scale();
    let mut out = Extraction { pairs: Vec::new(), discarded: Vec::new() };
    for (j, &mu) in eig.values.iter().enumerate() {
        let lambda = mu * m.scale + m.center;
        if !contour.contains(lambda, margin) {
            log::info!("discarding exterior Ritz value {lambda}");
            out.discarded.push(lambda);
            continue;
        }
        let mut v = g.col(j).to_vec();
        let norm = vec_norm(&v);
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        out.pairs.push((lambda, v));
    }
    Ok(out)
}

/// Output of [`solve_reduced`].
#[derive(Clone, Debug)]
pub struct ReducedSolution {
    /// Sorted by `(Re λ, Im λ)`.
    pub pairs: Vec<ReducedPair>,
    pub count: EigencountReport,
    pub hankel_singular_values: Vec<f64>,
    pub discarded: Vec<Complex64>,
    pub perturbed_nodes: Vec<usize>,
}

pub(crate) fn sort_by_value<T>(items: &mut [T], key: impl Fn(&T) -> Complex64) {
    items.sort_by(|a, b| {
        let (x, y) = (key(a), key(b));
        x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im))
    });
}

/// Moments, Hankel pencil, eigenvalue count and extraction in one call.
pub fn solve_reduced(
    t: &ReducedNep,
    contour: &Contour,
    quad_nodes: usize,
    blocks: usize,
    tol_gap: f64,
) -> Result<ReducedSolution> {
    let quad = contour.quadrature(quad_nodes)?;
    let pass = reduced_moments(t, &quad, contour.center(), contour.scale(), blocks)?;
    let (h, hs) = hankel_pencil(&pass.moments);
    let h_svd = svd(&h)?;
    let mut count = count_eigenvalues(pass.winding, &h_svd.singular_values, tol_gap)?;
    log::info!(
        "eigencount: winding {:.6} (rounded {}), gap index {:?} ratio {:.3e}, strategy {:?}",
        count.winding,
        count.winding_rounded,
        count.gap_index,
        count.gap_ratio,
        count.strategy
    );

    let mut best: Option<(f64, usize, Vec<ReducedPair>, Vec<Complex64>)> = None;
    for &candidate in &count.candidates {
        let ex = match extract_eigenpairs(&pass.moments, &hs, &h_svd, candidate, contour) {
            Ok(ex) => ex,
            Err(e) if count.candidates.len() > 1 => {
                log::warn!("count {candidate} rejected: {e}");
                continue;
            }
            Err(e) => return Err(e),
        };
        let pairs: Vec<ReducedPair> = ex
            .pairs
            .into_iter()
            .map(|(value, vector)| {
                let residual = t.residual(value, &vector).unwrap_or(f64::INFINITY);
                ReducedPair { value, vector, residual }
            })
            .collect();
        let worst = pairs.iter().map(|p| p.residual).fold(0.0, f64::max);
        if best.as_ref().is_none_or(|b| worst < b.0) {
            best = Some((worst, candidate, pairs, ex.discarded));
        }
    }
    let (_, chosen, mut pairs, discarded) =
        best.ok_or(Error::RankCollapse { count: count.chosen, ratio: 0.0 })?;
    count.chosen = chosen;
    sort_by_value(&mut pairs, |p| p.value);
    Ok(ReducedSolution {
        pairs,
        count,
        hankel_singular_values: h_svd.singular_values,
        discarded,
        perturbed_nodes: pass.perturbed,
    })
}
