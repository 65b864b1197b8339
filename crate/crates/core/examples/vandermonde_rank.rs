//! Numerical rank of generalized Vandermonde matrices for the monomial and
//! Chebyshev bases, 50 nodes equispaced in [−0.9, 0.9].

use rsrr::subspace::{vandermonde_rank_experiment, write_rank_csv, MomentBasis};

fn main() -> rsrr::Result<()> {
    let eigs: Vec<f64> = (0..50).map(|k| -0.9 + 1.8 * k as f64 / 49.0).collect();
    let mono = vandermonde_rank_experiment(&eigs, 200, 1e-12, MomentBasis::Monomial)?;
    let cheb = vandermonde_rank_experiment(&eigs, 200, 1e-12, MomentBasis::Chebyshev)?;

    let peak = mono.iter().map(|r| r.rank).max().unwrap_or(0);
    let full = cheb.iter().find(|r| r.rank == 50).map(|r| r.k_prime);
    println!("monomial: rank never exceeds {peak}");
    println!("chebyshev: first K' with rank 50 is {full:?}");

    if let Some(path) = std::env::args().nth(1) {
        write_rank_csv(std::fs::File::create(&path)?, &cheb)?;
        println!("chebyshev table written to {path}");
    }
    Ok(())
}
