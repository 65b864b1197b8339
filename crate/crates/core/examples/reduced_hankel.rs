//! The block Hankel stage on its own: a 7×7 rational diagonal problem with
//! five zeros inside the unit circle and poles outside it.

use rsrr::contour::Contour;
use rsrr::linalg::ComplexMatrix;
use rsrr::problems::ScalarFunction;
use rsrr::reduced::{solve_reduced, ReducedNep};
use rsrr::Complex64;

fn main() -> rsrr::Result<()> {
    let c = Complex64::new;
    let zeros = [c(0.1, 0.2), c(-0.5, 0.0), c(0.4, -0.3), c(0.0, 0.6), c(-0.2, -0.5), c(2.0, 0.5), c(-1.0, 2.0)];
    let pole = c(3.0, 1.0);
    let n = zeros.len();

    // T_ii(z) = 1 − c_i z/(z + b), zero at −b/(1 − c_i)
    let mut terms = vec![(ComplexMatrix::identity(n), ScalarFunction::Constant { value: Complex64::ONE })];
    for (i, &z0) in zeros.iter().enumerate() {
        let mut e = ComplexMatrix::zeros(n, n);
        e[(i, i)] = Complex64::ONE;
        terms.push((e, ScalarFunction::Rational { a: -(Complex64::ONE + pole / z0), b: pole }));
    }
    let t = ReducedNep::from_terms(terms)?;
    let sol = solve_reduced(&t, &Contour::circle(Complex64::ZERO, 1.0)?, 256, 2, 1e3)?;

    println!("{:?}", sol.count);
    let sv: Vec<String> = sol.hankel_singular_values[..8].iter().map(|s| format!("{s:.2e}")).collect();
    println!("Hankel singular values: {}", sv.join(" "));
    for p in &sol.pairs {
        println!("{:+.12} {:+.12}i   residual {:.1e}", p.value.re, p.value.im, p.residual);
    }
    Ok(())
}
