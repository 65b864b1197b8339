//! Interpolating the projected matrix function instead of projecting each term.
//!
//! The problem is wrapped so that its sum form is hidden; the driver then
//! falls back to a Chebyshev interpolant on the contour's real interval.

use rsrr::contour::Contour;
use rsrr::driver::{solve_rsrr, ReductionMode, RsrrConfig, RsrrParams};
use rsrr::linalg::ComplexMatrix;
use rsrr::problems::{make_acoustic_1d, NepProblem};
use rsrr::Complex64;

struct BlackBox<P>(P);

impl<P: NepProblem> NepProblem for BlackBox<P> {
    fn dim(&self) -> usize {
        self.0.dim()
    }
    fn assemble(&self, z: Complex64) -> rsrr::Result<ComplexMatrix> {
        self.0.assemble(z)
    }
    fn derivative_assemble(&self, z: Complex64) -> rsrr::Result<ComplexMatrix> {
        self.0.derivative_assemble(z)
    }
    fn apply(&self, z: Complex64, x: &ComplexMatrix) -> rsrr::Result<ComplexMatrix> {
        self.0.apply(z, x)
    }
    fn solve(&self, z: Complex64, b: &ComplexMatrix) -> rsrr::Result<ComplexMatrix> {
        self.0.solve(z, b)
    }
}

fn main() -> rsrr::Result<()> {
    let problem = make_acoustic_1d(1000, Complex64::ONE)?;
    let contour = Contour::ellipse(Complex64::new(9.9, 0.8), 10.1, 1.01)?;
    let mut params = RsrrParams::new(2, 100, 2, 1000);

    let exact = solve_rsrr(&problem, &RsrrConfig::new(contour.clone(), params.clone()))?;
    params.mode = ReductionMode::Chebyshev { degree: 40, chop: true };
    let cheb = solve_rsrr(&BlackBox(problem), &RsrrConfig::new(contour, params))?;

    let worst = exact
        .pairs
        .iter()
        .zip(&cheb.pairs)
        .map(|(a, b)| (a.value - b.value).norm() / a.value.norm())
        .fold(0.0, f64::max);
    println!("explicit sum: {} pairs, chebyshev: {} pairs", exact.pairs.len(), cheb.pairs.len());
    println!("largest relative eigenvalue change {worst:.2e}");
    Ok(())
}
