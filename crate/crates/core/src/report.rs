//! JSON run reports and CSV eigenvalue tables.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::driver::{BasisDiagnostics, Comparison, EigenSolution, StageTimings};
use crate::error::Result;
use crate::reduced::EigencountReport;
use crate::subspace::{csv_error, MomentBasis};

/// Value of `schema_version` in every run report.
pub const RUN_REPORT_SCHEMA: &str = "rsrr.run_report.v1";

/// JSON Schema for [`RunReport`].
pub const RUN_REPORT_SCHEMA_JSON: &str = include_str!("../schema/run_report.v1.json");

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairRecord {
    pub index: usize,
    pub re: f64,
    pub im: f64,
    pub residual: f64,
    pub reduced_residual: f64,
    pub flagged: bool,
}

fn pair_records(sol: &EigenSolution) -> Vec<PairRecord> {
    sol.pairs
        .iter()
        .enumerate()
        .map(|(i, p)| PairRecord {
            index: i,
            re: p.value.re,
            im: p.value.im,
            residual: p.residual,
            reduced_residual: p.reduced_residual,
            flagged: sol.flagged.contains(&i),
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub eigenpairs: Vec<PairRecord>,
    pub eigencount: EigencountReport,
    pub basis: BasisDiagnostics,
    pub hankel_singular_values: Vec<f64>,
    pub discarded: Vec<Complex64>,
    pub perturbed_nodes: Vec<usize>,
    pub median_residual: f64,
    pub max_residual: f64,
    pub timings: StageTimings,
}

impl SolutionRecord {
    pub fn new(sol: &EigenSolution) -> Self {
        Self {
            eigenpairs: pair_records(sol),
            eigencount: sol.count.clone(),
            basis: sol.basis.clone(),
            hankel_singular_values: sol.hankel_singular_values.clone(),
            discarded: sol.discarded.clone(),
            perturbed_nodes: sol.perturbed_nodes.clone(),
            median_residual: sol.median_residual(),
            max_residual: sol.max_residual(),
            timings: sol.timings.clone(),
        }
    }
}

/// Nearest moment-scheme eigenvalue for one resolvent-sampling eigenvalue.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MatchRecord {
    pub rsrr_index: usize,
    pub ssrr_index: usize,
    pub distance: f64,
    pub rsrr_residual: f64,
    pub ssrr_residual: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SsrrRecord {
    pub k_prime: usize,
    pub moment_rank: usize,
    pub moment_singular_values: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solution: Option<SolutionRecord>,
    pub matches: Vec<MatchRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub basis: MomentBasis,
    pub sampling_rank: usize,
    pub runs: Vec<SsrrRecord>,
}

impl ComparisonRecord {
    pub fn new(cmp: &Comparison, basis: MomentBasis) -> Self {
        let runs = cmp
            .ssrr
            .iter()
            .map(|run| {
                let (solution, matches, error) = match &run.solution {
                    Ok(s) => (Some(SolutionRecord::new(s)), match_pairs(&cmp.rsrr, s), None),
                    Err(e) => (None, Vec::new(), Some(e.clone())),
                };
                SsrrRecord {
                    k_prime: run.k_prime,
                    moment_rank: run.moment_rank,
                    moment_singular_values: run.moment_singular_values.clone(),
                    solution,
                    matches,
                    error,
                }
            })
            .collect();
        Self { basis, sampling_rank: cmp.sampling_rank(), runs }
    }
}

fn match_pairs(rsrr: &EigenSolution, ssrr: &EigenSolution) -> Vec<MatchRecord> {
    rsrr.pairs
        .iter()
        .enumerate()
        .filter_map(|(i, p)| {
            ssrr.pairs
                .iter()
                .enumerate()
                .map(|(j, q)| (j, (q.value - p.value).norm(), q.residual))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .map(|(j, distance, ssrr_residual)| MatchRecord {
                    rsrr_index: i,
                    ssrr_index: j,
                    distance,
                    rsrr_residual: p.residual,
                    ssrr_residual,
                })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: String,
    pub code_version: String,
    pub command: String,
    pub config: RunConfig,
    pub solution: SolutionRecord,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eigenvector_file: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub comparison: Option<ComparisonRecord>,
}

impl RunReport {
    pub fn new(command: &str, config: &RunConfig, sol: &EigenSolution) -> Self {
        Self {
            schema_version: RUN_REPORT_SCHEMA.into(),
            code_version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config: config.clone(),
            solution: SolutionRecord::new(sol),
            eigenvector_file: None,
            comparison: None,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self).map_err(|e| crate::Error::InvalidParameter(format!("report: {e}")))?;
        s.push('\n');
        Ok(s)
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

/// Columns `index,re,im,residual,reduced_residual,flagged`.
pub fn write_eigenvalue_csv<W: Write>(out: W, sol: &EigenSolution) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in pair_records(sol) {
        w.serialize(r)
        .map_err(csv_error)?;
    }
    w.flush()?;
    Ok(())
}
