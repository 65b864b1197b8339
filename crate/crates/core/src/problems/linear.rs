use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{make_linear_pencil, SumFormNep};
use crate::error::{Error, Result};
use crate::linalg::{solve_dense, ComplexMatrix};

/// Linear test problem `A − zI` with a known spectrum.
#[derive(Clone, Debug)]
pub struct LinearOracle {
    pub problem: SumFormNep,
    pub matrix: ComplexMatrix,
    /// Eigenvalues of `matrix`, the first `inside` of them in the unit disc.
    pub spectrum: Vec<Complex64>,
    pub inside: usize,
}

/// `A = X D X⁻¹` with `inside` eigenvalues of modulus in `[0.1, 0.7]` and the
/// rest of modulus in `[1.5, 3]`, so the unit circle separates them cleanly.
/// `X` is a diagonally shifted random matrix, hence well conditioned.
pub fn random_linear_pencil(n: usize, inside: usize, seed: u64) -> Result<LinearOracle> {
    if n == 0 || inside > n {
        return Err(Error::InvalidParameter(format!("linear pencil needs 0 <= inside <= n, n >= 1; got n = {n}, inside = {inside}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let spectrum: Vec<Complex64> = (0..n)
        .map(|k| {
            let r = if k < inside { rng.random_range(0.1..0.7) } else { rng.random_range(1.5..3.0) };
            Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    let shift = 2.0 * (n as f64).sqrt();
    let x = ComplexMatrix::from_fn(n, n, |i, j| {
        let v = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        if i == j { v + shift } else { v }
    });
    let xd = x.matmul(&ComplexMatrix::from_diagonal(&spectrum));
    // A = X D X⁻¹ via Aᵀ = X⁻ᵀ (X D)ᵀ
    let matrix = solve_dense(&x.transpose(), &xd.transpose())?.transpose();
    let problem = make_linear_pencil(matrix.clone())?;
    Ok(LinearOracle { problem, matrix, spectrum, inside })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eig_dense;
    use crate::problems::NepProblem;

    #[test]
    fn spectrum_is_recovered_densely() {
        let o = random_linear_pencil(30, 7, 4).unwrap();
        let mut eig = eig_dense(&o.matrix).unwrap().values;
        assert_eq!(eig.iter().filter(|z| z.norm() < 1.0).count(), 7);
        for z in &o.spectrum {
            let (k, d) = eig
                .iter()
                .enumerate()
                .map(|(k, w)| (k, (w - z).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .unwrap();
            assert!(d < 1e-10, "{z}: {d:e}");
            eig.remove(k);
        }
        assert_eq!(o.problem.dim(), 30);
        assert!(random_linear_pencil(3, 4, 0).is_err());
    }
}
