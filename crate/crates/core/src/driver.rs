//! End-to-end resolvent sampling Rayleigh-Ritz solver and the moment-based baseline.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cheb::reduce_interpolant;
use crate::contour::Contour;
use crate::error::{Error, Result};
use crate::linalg::{numerical_rank, singular_values, vec_norm, ComplexMatrix};
use crate::problems::{NepProblem, SumTerm};
use crate::reduced::{solve_reduced, sort_by_value, EigencountReport, ReducedNep, ReducedSolution};
use crate::subspace::{
    moment_matrix_from_samples, orthonormal_basis, sample_resolvent, MomentBasis, ProbeMatrix, ResolventSamples,
    SubspaceBasis,
};

/// Degree used by [`ReductionMode::Auto`] when the problem has no sum form.
pub const DEFAULT_CHEBYSHEV_DEGREE: usize = 40;

/// How `Sᴴ T(z) S` is formed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReductionMode {
    /// Explicit sum when available, otherwise Chebyshev with the default degree.
    #[default]
    Auto,
    ExplicitSum,
    /// `chop` drops trailing coefficients at rounding level before evaluation.
    Chebyshev {
        degree: usize,
        #[serde(default = "yes")]
        chop: bool,
    },
}

fn yes() -> bool {
    true
}

/// Relative size below which trailing Chebyshev coefficients are dropped.
pub const CHEBYSHEV_CHOP_TOL: f64 = 1e-14;

fn default_delta() -> f64 {
    1e-14
}
fn default_tol_gap() -> f64 {
    1e3
}
fn default_residual_tol() -> f64 {
    1e-4
}

/// Solver parameters. Field names follow the usual notation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RsrrParams {
    /// Probe width.
    #[serde(rename = "L")]
    pub probe_width: usize,
    /// Sampling nodes on the contour.
    #[serde(rename = "N")]
    pub samples: usize,
    /// Relative SVD truncation for the basis.
    #[serde(default = "default_delta")]
    pub delta: f64,
    /// Hankel blocks.
    #[serde(rename = "K")]
    pub blocks: usize,
    /// Quadrature nodes for the reduced problem.
    #[serde(rename = "N_S")]
    pub reduced_nodes: usize,
    #[serde(default = "default_tol_gap")]
    pub tol_gap: f64,
    /// Pairs above this residual are flagged.
    #[serde(default = "default_residual_tol")]
    pub residual_tol: f64,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub mode: ReductionMode,
}

impl RsrrParams {
    pub fn new(probe_width: usize, samples: usize, blocks: usize, reduced_nodes: usize) -> Self {
        Self {
            probe_width,
            samples,
            delta: default_delta(),
            blocks,
            reduced_nodes,
            tol_gap: default_tol_gap(),
            residual_tol: default_residual_tol(),
            seed: 0,
            mode: ReductionMode::Auto,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, msg: String| Err(Error::InvalidParameter(format!("rsrr.{field}: {msg}")));
        if self.probe_width == 0 {
            return bad("L", "must be >= 1".into());
        }
        if self.samples == 0 {
            return bad("N", "must be >= 1".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta", format!("must lie in (0, 1), got {}", self.delta));
        }
        if self.blocks == 0 {
            return bad("K", "must be >= 1".into());
        }
        if self.reduced_nodes < 2 * self.blocks {
            return bad("N_S", format!("must be >= 2K = {}, got {}", 2 * self.blocks, self.reduced_nodes));
        }
        if !(self.tol_gap > 1.0) {
            return bad("tol_gap", format!("must exceed 1, got {}", self.tol_gap));
        }
        if !(self.residual_tol > 0.0) {
            return bad("residual_tol", format!("must be positive, got {}", self.residual_tol));
        }
        if let ReductionMode::Chebyshev { degree, .. } = self.mode {
            if degree == 0 {
                return bad("mode.degree", "must be >= 1".into());
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RsrrConfig {
    pub contour: Contour,
    pub params: RsrrParams,
}

impl RsrrConfig {
    pub fn new(contour: Contour, params: RsrrParams) -> Self {
        Self { contour, params }
    }

    pub fn validate(&self) -> Result<()> {
        self.contour.validate()?;
        self.params.validate()
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpair {
    pub value: Complex64,
    /// Unit 2-norm, largest-magnitude entry real and positive.
    pub vector: Vec<Complex64>,
    /// `‖T(λ)v‖₂ / ‖v‖₂` on the full problem.
    pub residual: f64,
    /// `‖T_S(λ)g‖₂ / ‖g‖₂` on the projected problem.
    pub reduced_residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BasisDiagnostics {
    /// Singular values of the sampling (or moment) matrix.
    pub singular_values: Vec<f64>,
    /// `k_S`
    pub rank: usize,
    pub delta: f64,
    pub columns: usize,
    /// `k_S` equals the column count; more samples may be needed.
    pub saturated: bool,
}

impl BasisDiagnostics {
    fn from_basis(b: &SubspaceBasis, columns: usize) -> Self {
        Self {
            singular_values: b.singular_values.clone(),
            rank: b.rank,
            delta: b.delta,
            columns,
            saturated: b.rank == columns,
        }
    }
}

/// Wall-clock seconds per stage.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct StageTimings {
    pub sampling: f64,
    pub basis: f64,
    pub reduction: f64,
    pub reduced_solve: f64,
    pub verification: f64,
}

#[derive(Clone, Debug)]
pub struct EigenSolution {
    /// Sorted by `(Re λ, Im λ)`.
    pub pairs: Vec<Eigenpair>,
    pub count: EigencountReport,
    pub basis: BasisDiagnostics,
    pub hankel_singular_values: Vec<f64>,
    /// Ritz values outside the contour.
    pub discarded: Vec<Complex64>,
    /// Sampling nodes that were moved off an eigenvalue.
    pub perturbed_nodes: Vec<usize>,
    /// Indices into `pairs` whose residual exceeds `residual_tol`.
    pub flagged: Vec<usize>,
    pub residual_tol: f64,
    pub timings: StageTimings,
}

impl EigenSolution {
    pub fn values(&self) -> Vec<Complex64> {
        self.pairs.iter().map(|p| p.value).collect()
    }

    pub fn residuals(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.residual).collect()
    }

    pub fn max_residual(&self) -> f64 {
        self.pairs.iter().map(|p| p.residual).fold(0.0, f64::max)
    }

    /// Median residual, `NaN` for an empty solution.
    pub fn median_residual(&self) -> f64 {
        median(self.residuals())
    }

    /// `n × m` matrix of eigenvectors.
    pub fn vectors(&self) -> ComplexMatrix {
        let n = self.pairs.first().map_or(0, |p| p.vector.len());
        ComplexMatrix::from_fn(n, self.pairs.len(), |i, j| self.pairs[j].vector[i])
    }

    /// Fails with [`Error::ResidualFailure`] when any pair was flagged.
    pub fn ensure_residuals(&self) -> Result<()> {
        if self.flagged.is_empty() {
            return Ok(());
        }
        Err(Error::ResidualFailure {
            indices: self.flagged.clone(),
            residuals: self.flagged.iter().map(|&i| self.pairs[i].residual).collect(),
            tol: self.residual_tol,
        })
    }
}

pub(crate) fn median(mut xs: Vec<f64>) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.sort_by(f64::total_cmp);
    let m = xs.len() / 2;
    if xs.len() % 2 == 1 {
        xs[m]
    } else {
        0.5 * (xs[m - 1] + xs[m])
    }
}

/// `‖T(λ)v‖₂ / ‖v‖₂` for each pair, against the full problem.
pub fn verify_residuals(problem: &dyn NepProblem, pairs: &[(Complex64, Vec<Complex64>)]) -> Result<Vec<f64>> {
    pairs
        .par_iter()
        .map(|(lambda, v)| {
            let r = problem.apply(*lambda, &ComplexMatrix::from_column(v))?;
            Ok(vec_norm(r.col(0)) / vec_norm(v))
        })
        .collect()
}

/// `residual / Σ_j |f_j(λ)| ‖T_j‖_F`, the backward-error scaling for sum forms.
pub fn relative_residual(terms: &[SumTerm], lambda: Complex64, residual: f64) -> Result<f64> {
    let mut scale = 0.0;
    for t in terms {
        scale += t.function.eval(lambda)?.norm() * t.matrix.norm_fro();
    }
    Ok(if scale > 0.0 { residual / scale } else { residual })
}

/// Unit norm with the largest-magnitude entry real and positive.
pub fn normalize_phase(v: &mut [Complex64]) {
    let norm = vec_norm(v);
    if norm == 0.0 {
        return;
    }
    let mut k = 0;
    for (i, x) in v.iter().enumerate() {
        if x.norm() > v[k].norm() {
            k = i;
        }
    }
    let phase = v[k].conj() / (v[k].norm() * norm);
    v.iter_mut().for_each(|x| *x *= phase);
}

fn build_reduction(problem: &dyn NepProblem, contour: &Contour, mode: ReductionMode, s: &ComplexMatrix) -> Result<ReducedNep> {
    let (degree, chop) = match (mode, problem.sum_terms()) {
        (ReductionMode::Auto | ReductionMode::ExplicitSum, Some(terms)) => {
            return ReducedNep::from_sum_terms(terms, s);
        }
        (ReductionMode::ExplicitSum, None) => {
            return Err(Error::InvalidParameter("rsrr.mode: problem has no explicit sum form".into()));
        }
        (ReductionMode::Auto, None) => (DEFAULT_CHEBYSHEV_DEGREE, true),
        (ReductionMode::Chebyshev { degree, chop }, _) => (degree, chop),
    };
    let (lo, hi) = contour.real_interval();
    let poly = reduce_interpolant(|x, b| problem.apply(Complex64::new(x, 0.0), b), s, degree, lo, hi)?;
    let tail = poly.tail_ratio();
    if tail > 1e-8 {
        log::warn!("chebyshev reduction may be under-resolved: tail ratio {tail:.3e} at degree {degree}");
    }
    let poly = if chop { poly.chopped(CHEBYSHEV_CHOP_TOL) } else { poly };
    log::info!("chebyshev reduction on [{lo}, {hi}]: degree {degree}, kept {}, tail ratio {tail:.3e}", poly.degree());
    ReducedNep::from_chebyshev(poly)
}

/// Rayleigh-Ritz on the column space of `source`.
fn rayleigh_ritz(
    problem: &dyn NepProblem,
    config: &RsrrConfig,
    source: &ComplexMatrix,
    perturbed_nodes: Vec<usize>,
    mut timings: StageTimings,
) -> Result<EigenSolution> {
    let p = &config.params;
    let t0 = Instant::now();
    let basis = orthonormal_basis(source, p.delta)?;
    let diagnostics = BasisDiagnostics::from_basis(&basis, source.ncols());
    log::info!("basis: k_S = {} of {} columns (delta {:e})", basis.rank, source.ncols(), p.delta);
    if diagnostics.saturated {
        log::warn!("basis saturated: k_S equals the column count {}; consider a larger N", source.ncols());
    }
    timings.basis = t0.elapsed().as_secs_f64();

    let t0 = Instant::now();
    let reduced = build_reduction(problem, &config.contour, p.mode, &basis.basis)?;
    timings.reduction = t0.elapsed().as_secs_f64();

    let t0 = Instant::now();
    let ReducedSolution { pairs: rpairs, count, hankel_singular_values, discarded, .. } =
        solve_reduced(&reduced, &config.contour, p.reduced_nodes, p.blocks, p.tol_gap)?;
    timings.reduced_solve = t0.elapsed().as_secs_f64();

    let t0 = Instant::now();
    let lifted: Vec<(Complex64, Vec<Complex64>)> = rpairs
        .iter()
        .map(|rp| {
            let mut v = basis.basis.matmul(&ComplexMatrix::from_column(&rp.vector)).col(0).to_vec();
            normalize_phase(&mut v);
            (rp.value, v)
        })
        .collect();
    let residuals = verify_residuals(problem, &lifted)?;
    let mut pairs: Vec<Eigenpair> = lifted
        .into_iter()
        .zip(residuals)
        .zip(&rpairs)
        .map(|(((value, vector), residual), rp)| Eigenpair {
            value,
            vector,
            residual,
            reduced_residual: rp.residual,
        })
        .collect();
    sort_by_value(&mut pairs, |p| p.value);
    timings.verification = t0.elapsed().as_secs_f64();

    let flagged: Vec<usize> = pairs
        .iter()
        .enumerate()
        .filter(|(_, e)| !(e.residual <= p.residual_tol))
        .map(|(i, _)| i)
        .collect();
    for &i in &flagged {
        log::warn!("pair {i} (lambda = {}) has residual {:.3e} > {:.1e}", pairs[i].value, pairs[i].residual, p.residual_tol);
    }
    Ok(EigenSolution {
        pairs,
        count,
        basis: diagnostics,
        hankel_singular_values,
        discarded,
        perturbed_nodes,
        flagged,
        residual_tol: p.residual_tol,
        timings,
    })
}

fn sample(problem: &dyn NepProblem, config: &RsrrConfig) -> Result<(ResolventSamples, Vec<Complex64>, f64)> {
    config.validate()?;
    let p = &config.params;
    let t0 = Instant::now();
    let quad = config.contour.sampling_quadrature(p.samples)?;
    let probe = ProbeMatrix::random(problem.dim(), p.probe_width, p.seed)?;
    let samples = sample_resolvent(problem, &quad, &probe)?;
    Ok((samples, quad.weights, t0.elapsed().as_secs_f64()))
}

/// Resolvent sampling scheme: the basis spans `[T(z_0)⁻¹U | … | T(z_{N−1})⁻¹U]`.
pub fn solve_rsrr(problem: &dyn NepProblem, config: &RsrrConfig) -> Result<EigenSolution> {
    let (samples, _, sampling) = sample(problem, config)?;
    let s_hat = samples.sampling_matrix()?;
    let timings = StageTimings { sampling, ..Default::default() };
    rayleigh_ritz(problem, config, &s_hat, samples.perturbed, timings)
}

/// Moment scheme: the basis spans `[M̂_0 | … | M̂_{K′−1}]`.
pub fn solve_ssrr(
    problem: &dyn NepProblem,
    config: &RsrrConfig,
    k_prime: usize,
    basis: MomentBasis,
) -> Result<EigenSolution> {
    let (samples, weights, sampling) = sample(problem, config)?;
    let m_hat = moment_matrix_from_samples(&samples, &weights, config.contour.center(), config.contour.scale(), k_prime, basis)?;
    let timings = StageTimings { sampling, ..Default::default() };
    rayleigh_ritz(problem, config, &m_hat, samples.perturbed, timings)
}

/// Both schemes on one set of resolvent samples.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub rsrr: EigenSolution,
    pub ssrr: Vec<SsrrRun>,
}

#[derive(Clone, Debug)]
pub struct SsrrRun {
    pub k_prime: usize,
    pub basis: MomentBasis,
    pub moment_singular_values: Vec<f64>,
    /// Numerical rank of `M̂` at `delta · σ₁`.
    pub moment_rank: usize,
    pub solution: Result<EigenSolution, String>,
}

impl Comparison {
    /// Numerical rank of `Ŝ` at `delta · σ₁`.
    pub fn sampling_rank(&self) -> usize {
        numerical_rank(&self.rsrr.basis.singular_values, self.rsrr.basis.delta)
    }
}

/// RSRR once and SSRR for every `K′` in `k_primes`, sharing the resolvent solves.
/// A failing SSRR run is recorded rather than aborting the comparison.
pub fn compare(
    problem: &dyn NepProblem,
    config: &RsrrConfig,
    k_primes: &[usize],
    basis: MomentBasis,
) -> Result<Comparison> {
    let (samples, weights, sampling) = sample(problem, config)?;
    let s_hat = samples.sampling_matrix()?;
    let timings = StageTimings { sampling, ..Default::default() };
    let rsrr = rayleigh_ritz(problem, config, &s_hat, samples.perturbed.clone(), timings.clone())?;
    let mut ssrr = Vec::with_capacity(k_primes.len());
    for &k_prime in k_primes {
        let m_hat = moment_matrix_from_samples(
            &samples,
            &weights,
            config.contour.center(),
            config.contour.scale(),
            k_prime,
            basis,
        )?;
        let moment_singular_values = singular_values(&m_hat)?;
        let moment_rank = numerical_rank(&moment_singular_values, config.params.delta);
        let solution = rayleigh_ritz(problem, config, &m_hat, samples.perturbed.clone(), timings.clone())
            .map_err(|e| {
                log::warn!("SSRR with K' = {k_prime} failed: {e}");
                e.to_string()
            });
        ssrr.push(SsrrRun { k_prime, basis, moment_singular_values, moment_rank, solution });
    }
    Ok(Comparison { rsrr, ssrr })
}

/// Sizes the global thread pool and makes dense kernels run sequentially so
/// results do not depend on the thread count. Call once, before any solve.
pub fn configure_threads(threads: Option<usize>) -> Result<()> {
    faer::set_global_parallelism(faer::Par::Seq);
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::InvalidParameter("threads: must be >= 1".into()));
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("thread pool already initialized; --threads ignored ({e})");
        }
    }
    Ok(())
}
