use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rsrr::contour::{ellipse_trapezoid, Contour};
use rsrr::driver::{solve_rsrr, RsrrConfig, RsrrParams};
use rsrr::linalg::{eig_dense, numerical_rank, singular_values, solve_dense, svd, ComplexMatrix};
use rsrr::problems::{make_linear_pencil, random_linear_pencil, NepProblem};
use rsrr::reduced::{count_eigenvalues, extract_eigenpairs, hankel_pencil, reduced_moments, ReducedNep};
use rsrr::subspace::{build_sampling_matrix, max_principal_angle, ProbeMatrix};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ComplexMatrix::from_fn(rows, cols, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

fn unit_circle_config(l: usize, n: usize, k: usize, ns: usize, seed: u64) -> RsrrConfig {
    let mut params = RsrrParams::new(l, n, k, ns);
    params.seed = seed;
    RsrrConfig::new(Contour::circle(Complex64::ZERO, 1.0).unwrap(), params)
}

fn light() -> ProptestConfig {
    ProptestConfig::with_cases(24)
}

proptest! {
    #![proptest_config(light())]

    #[test]
    fn dense_solve_round_trips(n in 1usize..24, nrhs in 1usize..4, seed in any::<u64>()) {
        let a = random_matrix(n, n, seed);
        let mut shifted = a.clone();
        shifted.add_scaled(c(2.0 * n as f64, 0.0), &ComplexMatrix::identity(n));
        let b = random_matrix(n, nrhs, seed ^ 1);
        let x = solve_dense(&shifted, &b).unwrap();
        let r = shifted.matmul(&x).sub(&b).norm_fro();
        prop_assert!(r <= 1e-10 * b.norm_fro().max(1.0), "residual {r}");
    }

    #[test]
    fn svd_reconstructs_every_shape(rows in 1usize..16, cols in 1usize..16, inner in 1usize..16, seed in any::<u64>()) {
        let a = random_matrix(rows, inner, seed).matmul(&random_matrix(inner, cols, seed ^ 7));
        let d = svd(&a).unwrap();
        let k = d.singular_values.len();
        prop_assert_eq!(k, rows.min(cols));
        prop_assert!(d.singular_values.windows(2).all(|w| w[0] >= w[1]));
        let sigma = ComplexMatrix::from_diagonal(&d.singular_values.iter().map(|&s| c(s, 0.0)).collect::<Vec<_>>());
        let back = d.u.matmul(&sigma).matmul(&d.v.adjoint());
        prop_assert!(back.sub(&a).norm_fro() <= 1e-12 * a.norm_fro().max(1.0));
        prop_assert!(numerical_rank(&d.singular_values, 1e-10) <= inner.min(rows).min(cols));
    }

    #[test]
    fn hermitian_eigenvalues_are_real(n in 1usize..20, seed in any::<u64>()) {
        let b = random_matrix(n, n, seed);
        let mut h = b.clone();
        h.add_scaled(Complex64::ONE, &b.adjoint());
        let e = eig_dense(&h).unwrap();
        let max = e.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        prop_assert!(e.values.iter().all(|v| v.im.abs() <= 1e-10 * max.max(1.0)));
    }

    #[test]
    fn ellipse_nodes_lie_on_curve_and_run_counterclockwise(
        cr in -5.0f64..5.0, ci in -5.0f64..5.0, a in 0.2f64..4.0, b in 0.2f64..4.0, n in 8usize..128,
    ) {
        let center = c(cr, ci);
        let q = ellipse_trapezoid(center, a, b, n).unwrap();
        for z in &q.nodes {
            let d = z - center;
            prop_assert!(((d.re / a).powi(2) + (d.im / b).powi(2) - 1.0).abs() < 1e-12);
        }
        // (1/2πi)∮ conj(z − γ) dz equals the enclosed area over π.
        let area: Complex64 = q.nodes.iter().zip(&q.weights).map(|(z, w)| w * (z - center).conj()).sum();
        prop_assert!((area - c(a * b, 0.0)).norm() < 1e-10 * a * b);
    }

    #[test]
    fn trapezoid_counts_poles(
        a in 0.5f64..3.0, ratio in 0.3f64..1.0, s in 0.0f64..0.8, t in 0.0f64..(2.0 * PI),
    ) {
        let b = a * ratio;
        let q = ellipse_trapezoid(Complex64::ZERO, a, b, 256).unwrap();
        let inside = c(s * a * t.cos(), s * b * t.sin());
        let outside = c((2.0 - s) * a * t.cos(), (2.0 - s) * b * t.sin());
        let sum = |p: Complex64| q.nodes.iter().zip(&q.weights).map(|(z, w)| w / (z - p)).sum::<Complex64>();
        prop_assert!((sum(inside) - Complex64::ONE).norm() < 1e-8);
        prop_assert!(sum(outside).norm() < 1e-8);
    }

    #[test]
    fn probe_is_bit_reproducible(n in 1usize..40, seed in any::<u64>()) {
        let l = 1 + (seed as usize % n);
        let a = ProbeMatrix::random(n, l, seed).unwrap();
        let b = ProbeMatrix::random(n, l, seed).unwrap();
        prop_assert_eq!(a.matrix(), b.matrix());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn sampling_span_ignores_node_order(seed in any::<u64>()) {
        let oracle = random_linear_pencil(40, 6, seed).unwrap();
        let probe = ProbeMatrix::random(40, 2, seed).unwrap();
        let q = Contour::circle(Complex64::ZERO, 1.0).unwrap().sampling_quadrature(8).unwrap();
        let mut shuffled = q.nodes.clone();
        shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let s1 = build_sampling_matrix(&oracle.problem, &q.nodes, &probe).unwrap();
        let s2 = build_sampling_matrix(&oracle.problem, &shuffled, &probe).unwrap();
        prop_assert!(max_principal_angle(&s1, &s2).unwrap() <= 1e-10);
    }

    #[test]
    fn adding_nodes_grows_the_spectrum(seed in any::<u64>(), take in 1usize..16) {
        let oracle = random_linear_pencil(40, 6, seed).unwrap();
        let probe = ProbeMatrix::random(40, 2, seed).unwrap();
        let q = Contour::circle(Complex64::ZERO, 1.0).unwrap().sampling_quadrature(16).unwrap();
        let sub = singular_values(&build_sampling_matrix(&oracle.problem, &q.nodes[..take], &probe).unwrap()).unwrap();
        let full = singular_values(&build_sampling_matrix(&oracle.problem, &q.nodes, &probe).unwrap()).unwrap();
        prop_assert!(full[0] >= sub[0] * (1.0 - 1e-12));
        let sub_rank = sub.iter().filter(|&&s| s > 1e-12 * full[0]).count();
        prop_assert!(numerical_rank(&full, 1e-12) >= sub_rank);
    }

    #[test]
    fn solutions_are_contained_counted_and_consistent(seed in any::<u64>(), inside in 1usize..10) {
        let oracle = random_linear_pencil(30, inside, seed).unwrap();
        let cfg = unit_circle_config(4, 32, 2, 128, seed);
        let sol = solve_rsrr(&oracle.problem, &cfg).unwrap();
        let margin = 1e-10 * cfg.contour.scale();

        prop_assert_eq!(sol.pairs.len(), inside);
        prop_assert_eq!(sol.pairs.len() + sol.discarded.len(), sol.count.chosen);
        prop_assert!((sol.count.winding - sol.count.chosen as f64).abs() <= 0.1);
        for p in &sol.pairs {
            prop_assert!(cfg.contour.contains(p.value, margin));
            prop_assert!(p.reduced_residual <= 10.0 * p.residual + 1e-12);
            prop_assert!(p.residual <= 1e-8);
            let err = oracle.spectrum[..inside].iter().map(|e| (e - p.value).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(err <= 1e-8, "eigenvalue error {err}");
        }
        let hankel_rank = numerical_rank(&sol.hankel_singular_values, 1e-12);
        prop_assert_eq!(hankel_rank, inside);
    }

    #[test]
    fn affine_map_of_problem_maps_eigenvalues(seed in any::<u64>(), alpha in 0.3f64..4.0, br in -3.0f64..3.0, bi in -3.0f64..3.0) {
        let oracle = random_linear_pencil(24, 5, seed).unwrap();
        let beta = c(br, bi);
        let mut a = oracle.matrix.scaled(c(alpha, 0.0));
        a.add_scaled(beta, &ComplexMatrix::identity(24));
        let mapped = make_linear_pencil(a).unwrap();

        let base = solve_rsrr(&oracle.problem, &unit_circle_config(4, 32, 2, 128, seed)).unwrap();
        let mut params = RsrrParams::new(4, 32, 2, 128);
        params.seed = seed;
        let cfg = RsrrConfig::new(Contour::circle(beta, alpha).unwrap(), params);
        let moved = solve_rsrr(&mapped, &cfg).unwrap();

        prop_assert_eq!(base.pairs.len(), moved.pairs.len());
        for p in &base.pairs {
            let target = p.value * alpha + beta;
            let err = moved.pairs.iter().map(|q| (q.value - target).norm()).fold(f64::INFINITY, f64::min);
            prop_assert!(err <= 1e-8 * alpha, "mapped eigenvalue off by {err}");
        }
    }

    #[test]
    fn reduced_eigenvalues_do_not_depend_on_scale(seed in any::<u64>(), factor in 0.5f64..3.0) {
        let oracle = random_linear_pencil(12, 5, seed).unwrap();
        let terms = oracle.problem.sum_terms().unwrap();
        let reduced = ReducedNep::from_sum_terms(terms, &ComplexMatrix::identity(12)).unwrap();
        let contour = Contour::circle(Complex64::ZERO, 1.0).unwrap();
        let quad = contour.quadrature(128).unwrap();
        let values = |scale: f64| {
            let pass = reduced_moments(&reduced, &quad, Complex64::ZERO, scale, 3).unwrap();
            let (h, hs) = hankel_pencil(&pass.moments);
            let d = svd(&h).unwrap();
            let count = count_eigenvalues(pass.winding, &d.singular_values, 1e3).unwrap();
            let mut v: Vec<Complex64> = extract_eigenpairs(&pass.moments, &hs, &d, count.chosen, &contour)
                .unwrap()
                .pairs
                .into_iter()
                .map(|(l, _)| l)
                .collect();
            v.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
            v
        };
        let a = values(1.0);
        let b = values(factor);
        prop_assert_eq!(a.len(), 5);
        prop_assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).norm() <= 1e-10 * x.norm().max(1.0), "{x} vs {y}");
        }
    }
}

#[test]
fn identical_config_gives_identical_output() {
    let oracle = random_linear_pencil(30, 7, 11).unwrap();
    let cfg = unit_circle_config(4, 32, 2, 128, 5);
    let a = solve_rsrr(&oracle.problem, &cfg).unwrap();
    let b = solve_rsrr(&oracle.problem, &cfg).unwrap();
    assert_eq!(a.values(), b.values());
    assert_eq!(a.residuals(), b.residuals());
    assert_eq!(a.basis.rank, b.basis.rank);
    assert_eq!(a.vectors(), b.vectors());
}

#[test]
fn sampling_rank_dominates_moment_rank() {
    let oracle = random_linear_pencil(40, 9, 3).unwrap();
    let cfg = unit_circle_config(3, 16, 2, 128, 3);
    let cmp = rsrr::driver::compare(&oracle.problem, &cfg, &[4, 8, 16], rsrr::subspace::MomentBasis::Monomial).unwrap();
    for run in &cmp.ssrr {
        assert!(cmp.sampling_rank() >= run.moment_rank, "K' = {}", run.k_prime);
    }
}
