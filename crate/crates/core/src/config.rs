//! Run configuration files and the built-in benchmark presets.
//!
//! A configuration is TOML with four blocks: `problem`, `contour`, `rsrr` and
//! `output`, plus an optional `compare`. Unknown keys are rejected. Relative
//! paths are resolved against the directory holding the configuration file.

use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::contour::Contour;
use crate::driver::{RsrrConfig, RsrrParams};
use crate::error::{Error, Result};
use crate::problems::mmio::load_matrix_market_sparse;
use crate::problems::{
    make_acoustic_1d, make_biot_damped, make_gun_form, make_loaded_string, random_linear_pencil, BiotModulus,
    NepProblem, ScalarFunction, SumFormNep, SumTerm,
};
use crate::subspace::MomentBasis;

fn one() -> Complex64 {
    Complex64::ONE
}

fn gun_sigma2() -> f64 {
    108.8774
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TermSpec {
    /// Matrix Market file.
    pub matrix: PathBuf,
    pub function: ScalarFunction,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSpec {
    #[serde(rename = "acoustic_1d")]
    Acoustic1d {
        n: usize,
        #[serde(default = "one")]
        zeta: Complex64,
    },
    LoadedString { n: usize },
    /// `A − zI` with `inside` eigenvalues in the unit disc.
    LinearRandom {
        n: usize,
        inside: usize,
        #[serde(default)]
        seed: u64,
    },
    SumForm { terms: Vec<TermSpec> },
    Biot {
        mass: PathBuf,
        viscous: PathBuf,
        stiffness: PathBuf,
        modulus: BiotModulus,
    },
    /// Expects `K.mtx`, `M.mtx`, `W1.mtx` and `W2.mtx` in `data_dir`.
    Gun {
        data_dir: PathBuf,
        #[serde(default)]
        sigma1: f64,
        #[serde(default = "gun_sigma2")]
        sigma2: f64,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompareSpec {
    /// Moment counts to run the moment scheme with.
    pub k_prime: Vec<usize>,
    #[serde(default)]
    pub basis: MomentBasis,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// JSON report; standard output when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report: Option<PathBuf>,
    /// Eigenvalue table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Matrix Market array file with one eigenvector per column.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eigenvectors: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSpec,
    pub contour: Contour,
    pub rsrr: RsrrParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub compare: Option<CompareSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn field_error(field: &str, msg: impl std::fmt::Display) -> Error {
    Error::InvalidParameter(format!("{field}: {msg}"))
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::InvalidParameter(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Parses, validates and resolves relative paths against the file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("config: cannot read {}: {e}", path.display())))?;
        let mut cfg = Self::from_toml_str(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::InvalidParameter(format!("config: {e}")))
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match &mut self.problem {
            ProblemSpec::SumForm { terms } => terms.iter_mut().for_each(|t| fix(&mut t.matrix)),
            ProblemSpec::Biot { mass, viscous, stiffness, .. } => {
                fix(mass);
                fix(viscous);
                fix(stiffness);
            }
            ProblemSpec::Gun { data_dir, .. } => fix(data_dir),
            _ => {}
        }
        for p in [&mut self.output.report, &mut self.output.csv, &mut self.output.eigenvectors].into_iter().flatten() {
            fix(p);
        }
    }

    /// Checks every field that can be checked without touching the disk.
    pub fn validate(&self) -> Result<()> {
        self.contour.validate()?;
        self.rsrr.validate()?;
        if let Contour::Rectangle { n_long: Some(l), n_short: Some(s), .. } = self.contour {
            if 2 * (l + s) != self.rsrr.samples {
                return Err(field_error("rsrr.N", format!("rectangle side counts give {} nodes, N = {}", 2 * (l + s), self.rsrr.samples)));
            }
        }
        match &self.problem {
            ProblemSpec::Acoustic1d { n, zeta } => {
                if *n < 2 {
                    return Err(field_error("problem.n", format!("must be >= 2, got {n}")));
                }
                if zeta.norm() == 0.0 || !zeta.is_finite() {
                    return Err(field_error("problem.zeta", "must be finite and nonzero"));
                }
            }
            ProblemSpec::LoadedString { n } if *n < 2 => {
                return Err(field_error("problem.n", format!("must be >= 2, got {n}")));
            }
            ProblemSpec::LinearRandom { n, inside, .. } if *n == 0 || inside > n => {
                return Err(field_error("problem.inside", format!("must lie in 0..={n}")));
            }
            ProblemSpec::SumForm { terms } if terms.is_empty() => {
                return Err(field_error("problem.terms", "must not be empty"));
            }
            ProblemSpec::Biot { modulus, .. } => {
                modulus.validate().map_err(|e| field_error("problem.modulus", e))?;
            }
            ProblemSpec::Gun { sigma1, sigma2, .. } if !(*sigma1 >= 0.0 && *sigma2 >= 0.0) => {
                return Err(field_error("problem.sigma", "must be >= 0"));
            }
            _ => {}
        }
        if let Some(cmp) = &self.compare {
            if cmp.k_prime.is_empty() || cmp.k_prime.contains(&0) {
                return Err(field_error("compare.k_prime", "must be a nonempty list of positive integers"));
            }
        }
        Ok(())
    }

    pub fn solver_config(&self) -> RsrrConfig {
        RsrrConfig::new(self.contour.clone(), self.rsrr.clone())
    }
}

fn load_sparse(path: &Path) -> Result<crate::problems::CsrMatrix> {
    load_matrix_market_sparse(path).map_err(|e| match e {
        Error::Io(io) => Error::InvalidParameter(format!("{}: {io}", path.display())),
        other => other,
    })
}

impl ProblemSpec {
    /// Builds the problem, reading matrix files where needed.
    pub fn build(&self) -> Result<Box<dyn NepProblem>> {
        Ok(match self {
            ProblemSpec::Acoustic1d { n, zeta } => Box::new(make_acoustic_1d(*n, *zeta)?),
            ProblemSpec::LoadedString { n } => Box::new(make_loaded_string(*n)?),
            ProblemSpec::LinearRandom { n, inside, seed } => Box::new(random_linear_pencil(*n, *inside, *seed)?.problem),
            ProblemSpec::SumForm { terms } => {
                let terms = terms
                    .iter()
                    .map(|t| Ok(SumTerm::new(load_sparse(&t.matrix)?, t.function.clone())))
                    .collect::<Result<Vec<_>>>()?;
                Box::new(SumFormNep::new(terms)?)
            }
            ProblemSpec::Biot { mass, viscous, stiffness, modulus } => Box::new(make_biot_damped(
                load_sparse(mass)?,
                load_sparse(viscous)?,
                load_sparse(stiffness)?,
                modulus,
            )?),
            ProblemSpec::Gun { data_dir, sigma1, sigma2 } => {
                let m = |name: &str| load_sparse(&data_dir.join(name));
                Box::new(make_gun_form(m("K.mtx")?, m("M.mtx")?, m("W1.mtx")?, m("W2.mtx")?, *sigma1, *sigma2)?)
            }
        })
    }
}

/// Names accepted by [`bench_config`].
pub const BENCH_NAMES: [&str; 4] = ["acoustic1d", "string", "gun", "linear-oracle"];

/// Preset configurations for the standard benchmarks.
pub fn bench_config(name: &str, data_dir: Option<&Path>) -> Result<RunConfig> {
    let c = Complex64::new;
    let (problem, contour, rsrr) = match name {
        "acoustic1d" => (
            ProblemSpec::Acoustic1d { n: 1000, zeta: Complex64::ONE },
            Contour::ellipse(c(9.9, 0.8), 10.1, 1.01)?,
            RsrrParams::new(2, 100, 2, 1000),
        ),
        "string" => (
            ProblemSpec::LoadedString { n: 5000 },
            Contour::ellipse(c(5001.5, 0.0), 4998.5, 249.925)?,
            RsrrParams::new(1, 100, 8, 1000),
        ),
        "linear-oracle" => (
            ProblemSpec::LinearRandom { n: 50, inside: 12, seed: 0 },
            Contour::circle(Complex64::ZERO, 1.0)?,
            RsrrParams::new(4, 32, 2, 128),
        ),
        "gun" => {
            let dir = data_dir.ok_or_else(|| field_error("bench gun", "requires --data-dir"))?;
            (
                ProblemSpec::Gun { data_dir: dir.to_path_buf(), sigma1: 0.0, sigma2: gun_sigma2() },
                Contour::rectangle_with_sides(c(140.0, 0.0), c(335.4, 50.0), 12, 6)?,
                RsrrParams::new(4, 36, 2, 500),
            )
        }
        other => {
            return Err(field_error("bench", format!("unknown benchmark `{other}`; expected one of {BENCH_NAMES:?}")));
        }
    };
    Ok(RunConfig { problem, contour, rsrr, compare: None, output: OutputSpec::default() })
}
