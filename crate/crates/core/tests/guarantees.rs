mod common;

use common::rank_k;
use trunclsq_core::bench::synthetic_problem;
use trunclsq_core::dense::{thin_svd, truncate, DenseMatrix};
use trunclsq_core::regression::{
    approx_truncated_solve, exact_truncated_solve, exact_truncated_solve_with, full_ls_solve_with,
};
use trunclsq_core::sketch::{gaussian_matrix, gaussian_vector, RngSeed};
use trunclsq_core::subspace::approx_truncated_svd;
use trunclsq_core::theory::{
    appendix_bound_with, choose_p, guarantee_trial, projection_distance, projection_p, GapProfile,
};
use trunclsq_core::Vector;

#[test]
fn high_probability_guarantees_hold_on_a_gapped_instance() {
    let (n, k, eps, delta) = (100, 5, 0.2, 0.1);
    let problem = synthetic_problem(n, k, 0.5, 0.2, RngSeed::new(31)).unwrap();
    let svd = thin_svd(&problem.a).unwrap();
    let profile = GapProfile::from_svd(&svd, n, k).unwrap();
    let p = choose_p(eps, delta, &profile).unwrap();
    let trials = 200;
    let (mut residual, mut solution) = (0, 0);
    for t in 0..trials {
        let trial = guarantee_trial(
            &problem.a,
            &svd,
            &problem.b,
            k,
            p,
            eps,
            RngSeed::with_stream(32, t),
        )
        .unwrap();
        residual += trial.residual_ok as usize;
        solution += trial.solution_ok as usize;
    }
    let need = ((1.0 - 2.35 * delta - 0.05) * trials as f64).ceil() as usize;
    assert!(residual >= need, "residual guarantee {residual}/{trials}");
    assert!(solution >= need, "solution guarantee {solution}/{trials}");
}

#[test]
fn projection_distance_guarantee() {
    let (n, k, eps, delta) = (100, 5, 0.2, 0.1);
    let problem = synthetic_problem(n, k, 0.5, 0.2, RngSeed::new(41)).unwrap();
    let svd = thin_svd(&problem.a).unwrap();
    let uk = svd.u.leading_columns(k);
    let p = projection_p(eps, delta, n, 0.5).unwrap();
    let trials = 200;
    let hits = (0..trials)
        .filter(|&t| {
            let f = approx_truncated_svd(&problem.a, k, p, RngSeed::with_stream(42, t)).unwrap();
            projection_distance(&uk, &f.u).unwrap() <= eps
        })
        .count();
    let need = ((1.0 - 2.35 * delta - 0.05) * trials as f64).ceil() as usize;
    assert!(hits >= need, "{hits}/{trials}");
}

#[test]
fn choose_p_monotonicity() {
    let profile =
        |s1: f64, sk: f64, gamma: f64, n: usize| GapProfile::new(s1, sk, gamma * sk, n, 3).unwrap();
    let base = profile(2.0, 1.0, 0.6, 100);
    let p = |e: f64, d: f64, pr: &GapProfile| choose_p(e, d, pr).unwrap();
    let grid = [0.01, 0.05, 0.1, 0.3, 0.7, 1.0];
    for w in grid.windows(2) {
        assert!(p(w[1], 0.1, &base) <= p(w[0], 0.1, &base));
        assert!(p(0.1, w[1], &base) <= p(0.1, w[0], &base));
    }
    for w in [3usize, 10, 100, 1000, 100_000].windows(2) {
        assert!(
            p(0.1, 0.1, &profile(2.0, 1.0, 0.6, w[0]))
                <= p(0.1, 0.1, &profile(2.0, 1.0, 0.6, w[1]))
        );
    }
    for w in [0.01, 0.2, 0.5, 0.9, 0.99, 0.999].windows(2) {
        assert!(
            p(0.1, 0.1, &profile(2.0, 1.0, w[0], 100))
                <= p(0.1, 0.1, &profile(2.0, 1.0, w[1], 100))
        );
    }
}

#[test]
fn subspace_bound_decays_geometrically_in_p() {
    let a = gaussian_matrix(20, 12, RngSeed::new(5));
    let svd = thin_svd(&a).unwrap();
    let k = 3;
    let gamma = svd.sigma[k] / svd.sigma[k - 1];
    let s = gaussian_matrix(12, k, RngSeed::new(6));
    let bounds: Vec<f64> = (0..6)
        .map(|p| appendix_bound_with(&a, &svd, &s, k, p).unwrap().bound)
        .collect();
    for w in bounds.windows(2) {
        assert!((w[1] / w[0] - gamma * gamma).abs() <= 1e-10);
    }
}

#[test]
fn approximate_sigma_k_respects_weyl_lower_bound() {
    for seed in 0..40u64 {
        let a = gaussian_matrix(15, 10, RngSeed::new(seed));
        let svd = thin_svd(&a).unwrap();
        let k = 1 + (seed % 4) as usize;
        let f = approx_truncated_svd(&a, k, (seed % 5) as usize, RngSeed::new(seed + 500)).unwrap();
        let dist = projection_distance(&svd.u.leading_columns(k), &f.u).unwrap();
        assert!(f.sigma[k - 1] >= svd.sigma[k - 1] - svd.sigma[0] * dist - 1e-10 * svd.sigma[0]);
    }
}

#[test]
fn exact_rank_inputs_are_solved_exactly_without_power_steps() {
    for seed in 0..20u64 {
        let (m, n, k) = (12, 9, 1 + (seed % 4) as usize);
        let a = rank_k(m, n, k, seed);
        let b = gaussian_vector(m, RngSeed::new(seed + 70));
        let exact = exact_truncated_solve(&a, &b, k).unwrap();
        let approx = approx_truncated_solve(&a, &b, k, 0, RngSeed::new(seed + 80)).unwrap();
        let diff = approx.x.sub(&exact.x).norm();
        assert!(diff <= 1e-8 * exact.x.norm(), "seed {seed}");
    }
}

fn span_residual(v: &DenseMatrix, x: &Vector) -> f64 {
    let c = v.transpose_matvec(x.as_slice()).unwrap();
    let proj = v.matvec(&c).unwrap();
    x.sub(&Vector::new(proj).unwrap()).norm()
}

#[test]
fn residual_ordering_span_membership_and_triangle() {
    for seed in 0..25u64 {
        let a = gaussian_matrix(11, 7, RngSeed::new(seed));
        let b = gaussian_vector(11, RngSeed::new(seed + 1000));
        let svd = thin_svd(&a).unwrap();
        let full = full_ls_solve_with(&a, &b, &svd).unwrap();
        for k in 1..7 {
            let exact = exact_truncated_solve_with(&a, &b, k, &svd).unwrap();
            assert!(full.residual_norm <= exact.residual_norm + 1e-10 * b.norm());
            assert!(exact.residual_norm <= b.norm() * (1.0 + 1e-10));
            let vk = truncate(&svd, k).unwrap().v;
            assert!(span_residual(&vk, &exact.x) <= 1e-10 * exact.x.norm());

            let seed_k = RngSeed::with_stream(seed, k as u64);
            let f = approx_truncated_svd(&a, k, 1, seed_k).unwrap();
            let approx = approx_truncated_solve(&a, &b, k, 1, seed_k).unwrap();
            assert!(span_residual(&f.v, &approx.x) <= 1e-10 * approx.x.norm());
            let delta = Vector::new(a.matvec(approx.x.sub(&exact.x).as_slice()).unwrap())
                .unwrap()
                .norm();
            assert!(approx.residual_norm <= exact.residual_norm + delta + 1e-10 * b.norm());
        }
    }
}
