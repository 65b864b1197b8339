//! Command-line front end. Exit codes: 0 success, 1 solver failure, 2 configuration error.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::{bench_config, CompareSpec, RunConfig};
use crate::driver::{compare, configure_threads, solve_rsrr, EigenSolution};
use crate::error::{Error, Result};
use crate::problems::mmio::write_matrix_market;
use crate::report::{write_eigenvalue_csv, ComparisonRecord, RunReport};
use crate::subspace::{vandermonde_rank_experiment, write_rank_csv, MomentBasis};

pub const EXIT_SOLVER: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "rsrr", version, about = "Contour-integral solver for nonlinear eigenvalue problems")]
struct Cli {
    /// Worker threads for the parallel stages.
    #[arg(long, global = true, env = "RSRR_THREADS")]
    threads: Option<usize>,
    /// Log progress to standard error (repeat for more detail).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the problem described by a TOML configuration.
    Solve {
        config: PathBuf,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run resolvent sampling and the moment scheme on the same samples.
    Compare {
        config: PathBuf,
        /// Moment counts; overrides `compare.k_prime`.
        #[arg(long, value_delimiter = ',')]
        k_prime: Vec<usize>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Numerical rank of generalized Vandermonde matrices as a CSV table.
    RankExperiment {
        #[arg(long, default_value_t = -0.9, allow_negative_numbers = true)]
        eigs_lo: f64,
        #[arg(long, default_value_t = 0.9, allow_negative_numbers = true)]
        eigs_hi: f64,
        #[arg(long, default_value_t = 50)]
        count: usize,
        #[arg(long, default_value_t = 1e-12)]
        tol: f64,
        #[arg(long, default_value_t = 200)]
        kmax: usize,
        #[arg(long, value_enum, default_value_t = BasisArg::Monomial)]
        basis: BasisArg,
        /// CSV destination; standard output when absent.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Run a preset benchmark: acoustic1d, string, gun or linear-oracle.
    Bench {
        name: String,
        /// Directory with K.mtx, M.mtx, W1.mtx and W2.mtx (gun only).
        #[arg(long)]
        data_dir: Option<PathBuf>,
        /// Print the preset as TOML instead of running it.
        #[arg(long)]
        print_config: bool,
        /// Also run the moment scheme with K′ = N.
        #[arg(long)]
        compare: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
}

#[derive(clap::Args, Debug)]
struct OutputArgs {
    /// JSON report path; overrides `output.report`.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Eigenvalue CSV path; overrides `output.csv`.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Eigenvector Matrix Market path; overrides `output.eigenvectors`.
    #[arg(long)]
    eigenvectors: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BasisArg {
    Monomial,
    Chebyshev,
}

impl From<BasisArg> for MomentBasis {
    fn from(b: BasisArg) -> Self {
        match b {
            BasisArg::Monomial => MomentBasis::Monomial,
            BasisArg::Chebyshev => MomentBasis::Chebyshev,
        }
    }
}

/// Failure with its exit code.
#[derive(Debug)]
enum Failure {
    Config(Error),
    Solver(Error),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Solver(_) => EXIT_SOLVER,
        }
    }
}

fn config_err(e: Error) -> Failure {
    Failure::Config(e)
}

fn solver_err(e: Error) -> Failure {
    Failure::Solver(e)
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).parse_default_env().try_init();
    if let Err(e) = configure_threads(cli.threads) {
        eprintln!("error: {e}");
        return EXIT_CONFIG;
    }
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(f) => {
            let (Failure::Config(e) | Failure::Solver(e)) = &f;
            eprintln!("error: {e}");
            f.code()
        }
    }
}

fn dispatch(command: Command) -> Result<(), Failure> {
    match command {
        Command::Solve { config, out } => {
            let mut cfg = RunConfig::load(&config).map_err(config_err)?;
            out.apply(&mut cfg);
            execute("solve", &cfg)
        }
        Command::Compare { config, k_prime, out } => {
            let mut cfg = RunConfig::load(&config).map_err(config_err)?;
            out.apply(&mut cfg);
            if !k_prime.is_empty() {
                let basis = cfg.compare.as_ref().map(|c| c.basis).unwrap_or_default();
                cfg.compare = Some(CompareSpec { k_prime, basis });
            }
            if cfg.compare.is_none() {
                cfg.compare = Some(CompareSpec { k_prime: vec![cfg.rsrr.samples], basis: MomentBasis::Monomial });
            }
            cfg.validate().map_err(config_err)?;
            execute("compare", &cfg)
        }
        Command::RankExperiment { eigs_lo, eigs_hi, count, tol, kmax, basis, output } => {
            if !(eigs_lo < eigs_hi) || count < 2 {
                return Err(config_err(Error::InvalidParameter(
                    "rank-experiment: need eigs-lo < eigs-hi and count >= 2".into(),
                )));
            }
            let step = (eigs_hi - eigs_lo) / (count - 1) as f64;
            let eigs: Vec<f64> = (0..count).map(|k| eigs_lo + step * k as f64).collect();
            let rows = vandermonde_rank_experiment(&eigs, kmax, tol, basis.into()).map_err(config_err)?;
            match output {
                Some(p) => write_rank_csv(create(&p).map_err(solver_err)?, &rows),
                None => write_rank_csv(io::stdout().lock(), &rows),
            }
            .map_err(solver_err)
        }
        Command::Bench { name, data_dir, print_config, compare, out } => {
            let mut cfg = bench_config(&name, data_dir.as_deref()).map_err(config_err)?;
            if print_config {
                print!("{}", cfg.to_toml_string().map_err(config_err)?);
                return Ok(());
            }
            out.apply(&mut cfg);
            if compare {
                cfg.compare = Some(CompareSpec { k_prime: vec![cfg.rsrr.samples], basis: MomentBasis::Monomial });
            }
            execute("bench", &cfg)
        }
    }
}

impl OutputArgs {
    fn apply(self, cfg: &mut RunConfig) {
        if self.report.is_some() {
            cfg.output.report = self.report;
        }
        if self.csv.is_some() {
            cfg.output.csv = self.csv;
        }
        if self.eigenvectors.is_some() {
            cfg.output.eigenvectors = self.eigenvectors;
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

/// Builds the problem, solves, writes every requested artifact, then reports residual failures.
fn execute(command: &str, cfg: &RunConfig) -> Result<(), Failure> {
    let problem = cfg.problem.build().map_err(config_err)?;
    let solver = cfg.solver_config();
    let (solution, comparison) = match &cfg.compare {
        Some(spec) if command != "solve" => {
            let cmp = compare(&problem, &solver, &spec.k_prime, spec.basis).map_err(solver_err)?;
            let record = ComparisonRecord::new(&cmp, spec.basis);
            (cmp.rsrr, Some(record))
        }
        _ => (solve_rsrr(&problem, &solver).map_err(solver_err)?, None),
    };
    summarize(&solution);

    let mut report = RunReport::new(command, cfg, &solution);
    report.comparison = comparison;
    if let Some(p) = &cfg.output.eigenvectors {
        write_matrix_market(p, &solution.vectors()).map_err(solver_err)?;
        report.eigenvector_file = Some(p.display().to_string());
    }
    if let Some(p) = &cfg.output.csv {
        write_eigenvalue_csv(create(p).map_err(solver_err)?, &solution).map_err(solver_err)?;
    }
    let json = report.to_json().map_err(solver_err)?;
    match &cfg.output.report {
        Some(p) => std::fs::write(p, json).map_err(|e| solver_err(e.into()))?,
        None => io::stdout().lock().write_all(json.as_bytes()).map_err(|e| solver_err(e.into()))?,
    }
    solution.ensure_residuals().map_err(solver_err)
}

fn summarize(sol: &EigenSolution) {
    log::info!(
        "{} eigenpairs, k_S = {}, winding {:.6}, gap index {:?}, max residual {:.3e}",
        sol.pairs.len(),
        sol.basis.rank,
        sol.count.winding,
        sol.count.gap_index,
        sol.max_residual()
    );
}
