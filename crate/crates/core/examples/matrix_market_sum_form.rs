//! Building a problem from Matrix Market files.
//!
//! Writes `K`, `M` and `C` of a small damped spring chain to a temporary
//! directory, reads them back as a sum-form problem
//! `T(z) = K + z C + z² M` and solves it.

use rsrr::contour::Contour;
use rsrr::driver::{solve_rsrr, RsrrConfig, RsrrParams};
use rsrr::problems::mmio::{load_matrix_market_sparse, write_matrix_market_sparse};
use rsrr::problems::{CsrMatrix, ScalarFunction, SumFormNep, SumTerm};
use rsrr::Complex64;

fn main() -> rsrr::Result<()> {
    let n = 400;
    let re = |v: f64| Complex64::new(v, 0.0);
    let k = CsrMatrix::tridiagonal(&vec![re(-1.0); n - 1], &vec![re(2.0); n], &vec![re(-1.0); n - 1]);
    let m = CsrMatrix::tridiagonal(&vec![re(0.0); n - 1], &vec![re(1.0); n], &vec![re(0.0); n - 1]);
    let c = CsrMatrix::from_triplets(n, n, &[(0, 0, re(0.05)), (n - 1, n - 1, re(0.05))])?;

    let dir = std::env::temp_dir().join("rsrr_sum_form_example");
    std::fs::create_dir_all(&dir)?;
    for (name, mat) in [("K.mtx", &k), ("M.mtx", &m), ("C.mtx", &c)] {
        write_matrix_market_sparse(dir.join(name), mat)?;
    }

    let load = |name: &str| load_matrix_market_sparse(dir.join(name));
    let problem = SumFormNep::new(vec![
        SumTerm::new(load("K.mtx")?, ScalarFunction::Constant { value: Complex64::ONE }),
        SumTerm::new(load("C.mtx")?, ScalarFunction::Power { coeff: Complex64::ONE, exponent: 1 }),
        SumTerm::new(load("M.mtx")?, ScalarFunction::Power { coeff: Complex64::ONE, exponent: 2 }),
    ])?;

    // eigenvalues ±i·2 sin(jπ/2(n+1)); take the low-frequency ones in the upper half plane
    let contour = Contour::ellipse(Complex64::new(0.0, 0.1), 0.05, 0.06)?;
    let sol = solve_rsrr(&problem, &RsrrConfig::new(contour, RsrrParams::new(2, 64, 4, 512)))?;
    for p in &sol.pairs {
        println!("{:+.8} {:+.8}i   residual {:.1e}", p.value.re, p.value.im, p.residual);
    }
    Ok(())
}
