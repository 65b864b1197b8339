//! Loaded string with a rational term; 32 eigenvalues in [3, 10000].

use rsrr::contour::Contour;
use rsrr::driver::{solve_rsrr, RsrrConfig, RsrrParams};
use rsrr::problems::make_loaded_string;
use rsrr::Complex64;

fn main() -> rsrr::Result<()> {
    env_logger::init();
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(5000);
    let problem = make_loaded_string(n)?;
    let contour = Contour::ellipse(Complex64::new(5001.5, 0.0), 4998.5, 249.925)?;
    let config = RsrrConfig::new(contour, RsrrParams::new(1, 100, 8, 1000));

    let sol = solve_rsrr(&problem, &config)?;
    println!(
        "n = {n}, k_S = {}, winding {:.6}, gap index {:?}, {} eigenvalues",
        sol.basis.rank,
        sol.count.winding,
        sol.count.gap_index,
        sol.pairs.len()
    );
    for p in &sol.pairs {
        println!("{:>20.12} {:+.2e}i   residual {:.2e}", p.value.re, p.value.im, p.residual);
    }
    Ok(())
}
