//! Parallel and sequential backends on the hot paths.
//!
//! Group names carry the backend, so `cargo bench` and
//! `cargo bench --no-default-features` produce comparable reports. Under the
//! parallel backend each case is also run on a one-thread pool.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use trunclsq_core::bench::{run_experiment, ExperimentConfig, PRule};
use trunclsq_core::dense::{matmul, thin_svd};
use trunclsq_core::par;
use trunclsq_core::regression::approx_truncated_solve;
use trunclsq_core::sketch::{gaussian_matrix, gaussian_vector, RngSeed};

fn thread_settings() -> Vec<(String, usize)> {
    if par::is_parallel() {
        vec![("pool".into(), 0), ("1-thread".into(), 1)]
    } else {
        vec![("seq".into(), 0)]
    }
}

fn bench_matmul(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("matmul/{}", par::backend()));
    for n in [64, 128, 256] {
        let a = gaussian_matrix(n, n, RngSeed::new(1));
        let b = gaussian_matrix(n, n, RngSeed::new(2));
        for (label, threads) in thread_settings() {
            group.bench_with_input(BenchmarkId::new(label, n), &n, |bench, _| {
                bench.iter(|| {
                    par::with_threads(threads, || matmul(black_box(&a), black_box(&b)).unwrap())
                })
            });
        }
    }
    group.finish();
}

fn bench_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("solve/{}", par::backend()));
    group.sample_size(10);
    for n in [100, 200] {
        let a = gaussian_matrix(n, n, RngSeed::new(3));
        let b = gaussian_vector(n, RngSeed::new(4));
        for (label, threads) in thread_settings() {
            group.bench_with_input(
                BenchmarkId::new(format!("approx-k20-p10/{label}"), n),
                &n,
                |bench, _| {
                    bench.iter(|| {
                        par::with_threads(threads, || {
                            approx_truncated_solve(&a, &b, 20, 10, RngSeed::new(5)).unwrap()
                        })
                    })
                },
            );
        }
        group.bench_with_input(BenchmarkId::new("thin_svd", n), &n, |bench, _| {
            bench.iter(|| thin_svd(black_box(&a)).unwrap())
        });
    }
    group.finish();
}

fn bench_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group(format!("sweep/{}", par::backend()));
    group.sample_size(10);
    let mut cfg = ExperimentConfig::new(vec![40, 60], 5, 0.9, 4, 7);
    cfg.p_rule = PRule::Fixed(8);
    cfg.timing_repeats = 1;
    for (label, threads) in thread_settings() {
        group.bench_function(label, |bench| {
            bench.iter(|| par::with_threads(threads, || run_experiment(&cfg).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench_matmul, bench_solvers, bench_sweep);
criterion_main!(benches);
