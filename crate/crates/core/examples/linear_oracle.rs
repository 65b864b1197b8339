//! A random 50×50 linear problem checked against a dense eigendecomposition.

use rsrr::contour::Contour;
use rsrr::driver::{solve_rsrr, RsrrConfig, RsrrParams};
use rsrr::linalg::{eig_dense, ComplexMatrix};
use rsrr::problems::random_linear_pencil;
use rsrr::subspace::max_principal_angle;
use rsrr::Complex64;

fn main() -> rsrr::Result<()> {
    let oracle = random_linear_pencil(50, 12, 7)?;
    let dense = eig_dense(&oracle.matrix)?;

    let contour = Contour::circle(Complex64::ZERO, 1.0)?;
    let sol = solve_rsrr(&oracle.problem, &RsrrConfig::new(contour, RsrrParams::new(4, 32, 2, 128)))?;

    println!("{} of {} oracle eigenvalues found", sol.pairs.len(), oracle.inside);
    for p in &sol.pairs {
        let (k, err) = dense
            .values
            .iter()
            .map(|z| (z - p.value).norm())
            .enumerate()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("nonempty spectrum");
        let angle = max_principal_angle(
            &ComplexMatrix::from_column(dense.vectors.col(k)),
            &ComplexMatrix::from_column(&p.vector),
        )?;
        println!("{:>+.6} {:>+.6}i  |dλ| {err:.1e}  angle {angle:.1e}  residual {:.1e}", p.value.re, p.value.im, p.residual);
    }
    Ok(())
}
