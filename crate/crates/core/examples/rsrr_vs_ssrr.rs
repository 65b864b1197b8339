//! Resolvent sampling against the moment scheme on the same samples.
//!
//! `cargo run --release --example rsrr_vs_ssrr -- string` sweeps K′ over
//! 10..=32 with L = 4, N = 32; the default runs acoustic-1D with K′ = N.

use rsrr::contour::Contour;
use rsrr::driver::{compare, RsrrConfig, RsrrParams};
use rsrr::problems::{make_acoustic_1d, make_loaded_string, NepProblem};
use rsrr::subspace::MomentBasis;
use rsrr::Complex64;

fn main() -> rsrr::Result<()> {
    env_logger::init();
    let which = std::env::args().nth(1).unwrap_or_else(|| "acoustic".into());
    let (problem, contour, params, k_primes): (Box<dyn NepProblem>, _, _, Vec<usize>) = match which.as_str() {
        "string" => (
            Box::new(make_loaded_string(5000)?),
            Contour::ellipse(Complex64::new(5001.5, 0.0), 4998.5, 249.925)?,
            RsrrParams::new(4, 32, 8, 1000),
            (10..=32).collect(),
        ),
        "string-table" => (
            Box::new(make_loaded_string(5000)?),
            Contour::ellipse(Complex64::new(5001.5, 0.0), 4998.5, 249.925)?,
            RsrrParams::new(1, 100, 8, 1000),
            vec![100],
        ),
        _ => (
            Box::new(make_acoustic_1d(1000, Complex64::ONE)?),
            Contour::ellipse(Complex64::new(9.9, 0.8), 10.1, 1.01)?,
            RsrrParams::new(2, 100, 2, 1000),
            vec![100],
        ),
    };
    let cmp = compare(&problem, &RsrrConfig::new(contour, params), &k_primes, MomentBasis::Monomial)?;
    println!(
        "RSRR: rank(S) = {}, {} pairs, median residual {:.2e}",
        cmp.sampling_rank(),
        cmp.rsrr.pairs.len(),
        cmp.rsrr.median_residual()
    );
    println!("{:>4} {:>8} {:>6} {:>14} {:>14}", "K'", "rank(M)", "pairs", "median res", "max res");
    for run in &cmp.ssrr {
        match &run.solution {
            Ok(s) => println!(
                "{:>4} {:>8} {:>6} {:>14.2e} {:>14.2e}",
                run.k_prime,
                run.moment_rank,
                s.pairs.len(),
                s.median_residual(),
                s.max_residual()
            ),
            Err(e) => println!("{:>4} {:>8} failed: {e}", run.k_prime, run.moment_rank),
        }
    }
    Ok(())
}
