//! The gun cavity problem from Matrix Market files.
//!
//! `cargo run --release --example gun -- <dir>` where `<dir>` holds `K.mtx`,
//! `M.mtx`, `W1.mtx` and `W2.mtx`. Without a directory the example exits
//! after printing what it needs.

use rsrr::config::bench_config;
use rsrr::driver::{relative_residual, solve_rsrr};
use rsrr::problems::NepProblem;

fn main() -> rsrr::Result<()> {
    env_logger::init();
    let Some(dir) = std::env::args().nth(1) else {
        eprintln!("usage: gun <dir with K.mtx M.mtx W1.mtx W2.mtx>");
        return Ok(());
    };
    let cfg = bench_config("gun", Some(dir.as_ref()))?;
    let problem = cfg.problem.build()?;
    let sol = solve_rsrr(&problem, &cfg.solver_config())?;
    println!("{} eigenvalues, winding {:.4}", sol.pairs.len(), sol.count.winding);
    let terms = problem.sum_terms().expect("gun is a sum form");
    for p in &sol.pairs {
        let rel = relative_residual(terms, p.value, p.residual)?;
        println!("{:>12.6} {:+.6}i   residual {:.1e}   relative {:.1e}", p.value.re, p.value.im, p.residual, rel);
    }
    Ok(())
}
