//! Acoustic-1D benchmark with the standard ellipse; prints the 40 interior eigenvalues.

use rsrr::contour::Contour;
use rsrr::driver::{solve_rsrr, RsrrConfig, RsrrParams};
use rsrr::problems::make_acoustic_1d;
use rsrr::Complex64;

fn main() -> rsrr::Result<()> {
    env_logger::init();
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1000);
    let problem = make_acoustic_1d(n, Complex64::ONE)?;
    let contour = Contour::ellipse(Complex64::new(9.9, 0.8), 10.1, 1.01)?;
    let config = RsrrConfig::new(contour, RsrrParams::new(2, 100, 2, 1000));

    let sol = solve_rsrr(&problem, &config)?;
    println!("n = {n}, k_S = {}, count = {} ({:?})", sol.basis.rank, sol.pairs.len(), sol.count.strategy);
    for p in &sol.pairs {
        println!("{:>22.15} {:+.15}i   residual {:.2e}", p.value.re, p.value.im, p.residual);
    }
    println!("max residual {:.2e}, {:.2}s total", sol.max_residual(), sol.timings.sampling + sol.timings.basis + sol.timings.reduction + sol.timings.reduced_solve + sol.timings.verification);
    Ok(())
}
