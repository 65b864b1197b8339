//! Viscoelastic damping through a Biot modulus with two relaxation terms.

use rsrr::contour::Contour;
use rsrr::driver::{solve_rsrr, RsrrConfig, RsrrParams};
use rsrr::problems::{make_biot_damped, BiotModulus, CsrMatrix};
use rsrr::Complex64;

fn main() -> rsrr::Result<()> {
    let n = 300;
    let h = 1.0 / n as f64;
    let re = |v: f64| Complex64::new(v, 0.0);
    let stiffness = CsrMatrix::tridiagonal(&vec![re(-1.0 / h); n - 1], &vec![re(2.0 / h); n], &vec![re(-1.0 / h); n - 1]);
    let mass = CsrMatrix::tridiagonal(&vec![re(h / 6.0); n - 1], &vec![re(4.0 * h / 6.0); n], &vec![re(h / 6.0); n - 1]);
    let viscous = stiffness.clone();
    let modulus = BiotModulus { g_inf: 0.02, a: vec![0.5, 0.3], b: vec![20.0, 80.0], leading_one: true };

    let problem = make_biot_damped(mass, viscous, stiffness, &modulus)?;
    // T(z) = z² M + G(z) K_v + K_s: eigenvalues near ±i·kπ; take the first few
    let contour = Contour::ellipse(Complex64::new(-0.5, 8.0), 2.0, 6.0)?;
    let sol = solve_rsrr(&problem, &RsrrConfig::new(contour, RsrrParams::new(2, 64, 4, 512)))?;
    println!("winding {:.4}, {} pairs", sol.count.winding, sol.pairs.len());
    for p in &sol.pairs {
        println!("{:+.8} {:+.8}i   residual {:.1e}", p.value.re, p.value.im, p.residual);
    }
    Ok(())
}
