use trunclsq_core::bench::{
    run_experiment, run_single, synthetic_problem, ExperimentConfig, PRule, CSV_HEADER,
};
use trunclsq_core::dense::{thin_svd, truncate};
use trunclsq_core::sketch::RngSeed;
use trunclsq_core::theory::GapProfile;

#[test]
fn rhs_is_mostly_inside_the_leading_space() {
    let (n, k) = (200, 20);
    let trials = 100;
    let hits = (0..trials)
        .filter(|&s| {
            let p = synthetic_problem(n, k, 0.99, 0.2, RngSeed::new(500 + s)).unwrap();
            let uk = truncate(&thin_svd(&p.a).unwrap(), k).unwrap().u;
            let inside =
                trunclsq_core::Vector::new(uk.transpose_matvec(p.b.as_slice()).unwrap()).unwrap();
            inside.norm() / p.b.norm() >= 0.8
        })
        .count();
    assert!(hits >= 95, "{hits}/{trials}");
}

#[test]
fn stored_gap_profile_is_recomputable() {
    for s in 0..5 {
        let p = synthetic_problem(60, 8, 0.9, 0.2, RngSeed::new(s)).unwrap();
        let m = GapProfile::measure(&p.a, 8).unwrap();
        for (x, y) in [
            (m.sigma_1, p.gap_profile.sigma_1),
            (m.sigma_k, p.gap_profile.sigma_k),
            (m.sigma_k_plus_1, p.gap_profile.sigma_k_plus_1),
            (m.gamma_k, p.gap_profile.gamma_k),
        ] {
            assert!((x - y).abs() <= 1e-8 * y);
        }
    }
}

fn config() -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(vec![40, 30], 4, 0.9, 3, 99);
    cfg.p_rule = PRule::Fixed(5);
    cfg.timing_repeats = 1;
    cfg
}

fn metrics(report: &trunclsq_core::bench::ExperimentReport) -> Vec<(usize, u64, f64, f64)> {
    report
        .rows
        .iter()
        .map(|r| {
            let m = r.outcome.as_ref().unwrap();
            (r.n, r.seed, m.objective_error, m.solution_error)
        })
        .collect()
}

#[test]
fn metrics_are_deterministic() {
    let a = run_experiment(&config()).unwrap();
    let b = run_experiment(&config()).unwrap();
    assert_eq!(metrics(&a), metrics(&b));
    assert_eq!(a.rows.len(), 6);
    let csv = a.to_csv();
    assert_eq!(csv.lines().next(), Some(CSV_HEADER));
    assert_eq!(csv.lines().count(), 7);
}

#[test]
fn rows_are_recomputable_from_their_seed() {
    let cfg = config();
    let report = run_experiment(&cfg).unwrap();
    for row in &report.rows {
        let m = row.outcome.as_ref().unwrap();
        let again = run_single(
            row.n,
            row.k,
            row.p,
            cfg.gamma_target,
            cfg.noise,
            row.seed,
            1,
        )
        .unwrap();
        assert!((again.objective_error - m.objective_error).abs() <= 1e-12);
        assert!((again.solution_error - m.solution_error).abs() <= 1e-12);
        assert!(m.objective_error.is_finite() && m.solution_error.is_finite());
    }
}

#[test]
fn summary_covers_each_size() {
    let report = run_experiment(&config()).unwrap();
    let summary = report.summary();
    assert_eq!(
        summary.iter().map(|s| s.n).collect::<Vec<_>>(),
        vec![30, 40]
    );
    assert!(summary.iter().all(|s| s.runs == 3 && s.failures == 0));
}
