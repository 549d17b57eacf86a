//! Synthetic regression problems with a planted spectral gap and the seeded
//! accuracy/timing sweep over them.

use std::fmt::Write as _;
use std::time::Duration;

use crate::dense::{matmul_nt, thin_svd, DenseMatrix, ThinSvd, Vector};
use crate::error::{Error, Result};
use crate::par;
use crate::regression::{
    approx_truncated_solve, exact_truncated_solve, solution_error, SolveOutcome,
};
use crate::sketch::{gaussian_matrix, gaussian_vector, splitmix64, RngSeed};
use crate::theory::GapProfile;

/// CSV header emitted by [`ExperimentReport::to_csv`].
pub const CSV_HEADER: &str = "n,k,p,seed,objective_error,solution_error,time_exact_s,time_approx_s";

/// Weight of the component of `b` outside the leading subspace in the
/// reference experiment.
pub const DEFAULT_NOISE: f64 = 0.2;

/// A regression problem `(A, b, k)` with its planted factorization.
#[derive(Debug, Clone)]
pub struct ProblemInstance {
    pub a: DenseMatrix,
    pub b: Vector,
    pub k: usize,
    pub gap_profile: GapProfile,
    pub seed: RngSeed,
    /// `A = U diag(sigma) V^T` as assembled.
    pub factors: ThinSvd,
}

/// `n x n` problem built from a Gaussian matrix whose trailing singular values
/// `sigma_{k+1..n}` are rescaled by one common factor so that
/// `sigma_{k+1} / sigma_k = gamma_target`, with
/// `b = A_k r1 / ||A_k r1|| + noise * r2 / ||r2||` for Gaussian `r1`, `r2`.
pub fn synthetic_problem(
    n: usize,
    k: usize,
    gamma_target: f64,
    noise: f64,
    seed: RngSeed,
) -> Result<ProblemInstance> {
    if k == 0 || k >= n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k < n, got k={k}, n={n}"
        )));
    }
    if !(gamma_target > 0.0 && gamma_target < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "gamma_target = {gamma_target} must lie in (0, 1)"
        )));
    }
    if !(noise >= 0.0 && noise.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "noise = {noise} must be >= 0"
        )));
    }

    let g = gaussian_matrix(n, n, seed.derive(0));
    let base = thin_svd(&g)?;
    if base.rank() < n {
        return Err(Error::InvalidTruncation {
            k: n,
            rank: base.rank(),
        });
    }
    let scale = gamma_target * base.sigma[k - 1] / base.sigma[k];
    let sigma: Vec<f64> = base
        .sigma
        .iter()
        .enumerate()
        .map(|(i, &s)| if i < k { s } else { s * scale })
        .collect();
    let factors = ThinSvd {
        u: base.u,
        sigma,
        v: base.v,
    };
    let a = matmul_nt(&factors.u.scale_columns(&factors.sigma), &factors.v)?;

    // A_k r1 = U_k diag(sigma_k) V_k^T r1
    let r1 = gaussian_vector(n, seed.derive(1));
    let mut coeffs = factors.v.transpose_matvec(r1.as_slice())?;
    for (i, c) in coeffs.iter_mut().enumerate() {
        *c = if i < k { *c * factors.sigma[i] } else { 0.0 };
    }
    let signal = Vector::new(factors.u.matvec(&coeffs)?)?;
    let r2 = gaussian_vector(n, seed.derive(2));
    let b = signal
        .scaled(1.0 / signal.norm())
        .sub(&r2.scaled(-noise / r2.norm()));

    let gap_profile = GapProfile::new(
        factors.sigma[0],
        factors.sigma[k - 1],
        factors.sigma[k],
        n,
        k,
    )?;
    Ok(ProblemInstance {
        a,
        b,
        k,
        gap_profile,
        seed,
        factors,
    })
}

/// Number of power steps as a function of `n`.
#[derive(Debug, Clone, Copy)]
pub enum PRule {
    /// `ceil(c * ln n)`
    LogScale(f64),
    Fixed(usize),
    Custom(fn(usize) -> usize),
}

impl PRule {
    pub fn p_for(&self, n: usize) -> usize {
        match *self {
            PRule::LogScale(c) => (c * (n as f64).ln()).ceil().max(0.0) as usize,
            PRule::Fixed(p) => p,
            PRule::Custom(f) => f(n),
        }
    }
}

impl Default for PRule {
    fn default() -> Self {
        PRule::LogScale(10.0)
    }
}

/// Sweep configuration.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub n_values: Vec<usize>,
    pub k: usize,
    pub p_rule: PRule,
    pub gamma_target: f64,
    pub noise: f64,
    pub seeds_per_n: usize,
    pub base_seed: u64,
    /// Each timed solve runs this many times; the minimum is kept.
    pub timing_repeats: usize,
}

impl ExperimentConfig {
    pub fn new(
        n_values: Vec<usize>,
        k: usize,
        gamma_target: f64,
        seeds_per_n: usize,
        base_seed: u64,
    ) -> Self {
        Self {
            n_values,
            k,
            p_rule: PRule::default(),
            gamma_target,
            noise: DEFAULT_NOISE,
            seeds_per_n,
            base_seed,
            timing_repeats: 3,
        }
    }
}

/// Metrics of one `(n, seed)` run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunMetrics {
    pub objective_error: f64,
    pub solution_error: f64,
    pub time_exact: Duration,
    pub time_approx: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRow {
    pub n: usize,
    pub k: usize,
    pub p: usize,
    pub seed: u64,
    /// A failed run keeps its error message instead of metrics.
    pub outcome: std::result::Result<RunMetrics, String>,
}

/// Per-`n` aggregates over the successful runs.
#[derive(Debug, Clone, PartialEq)]
pub struct NSummary {
    pub n: usize,
    pub runs: usize,
    pub failures: usize,
    pub median_objective_error: f64,
    pub mean_objective_error: f64,
    pub median_solution_error: f64,
    pub mean_solution_error: f64,
    /// Median over runs of `time_approx / time_exact`.
    pub median_time_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ExperimentReport {
    pub rows: Vec<ExperimentRow>,
}

/// Seed of trial `trial` at size `n`, derived from the sweep's base seed.
pub fn run_seed(base_seed: u64, n: usize, trial: usize) -> u64 {
    splitmix64(base_seed ^ splitmix64((n as u64) << 32 ^ trial as u64))
}

/// Builds the problem for `seed` and runs both solvers on it.
pub fn run_single(
    n: usize,
    k: usize,
    p: usize,
    gamma_target: f64,
    noise: f64,
    seed: u64,
    timing_repeats: usize,
) -> Result<RunMetrics> {
    let root = RngSeed::new(seed);
    let problem = synthetic_problem(n, k, gamma_target, noise, root)?;
    let sketch_seed = root.derive(3);
    let (a, b) = (&problem.a, &problem.b);

    let exact = timed(timing_repeats, || exact_truncated_solve(a, b, k))?;
    let approx = timed(timing_repeats, || {
        approx_truncated_solve(a, b, k, p, sketch_seed)
    })?;
    Ok(RunMetrics {
        objective_error: (approx.residual_norm - exact.residual_norm) / exact.rhs_norm,
        solution_error: solution_error(&exact.x, &approx.x).value,
        time_exact: exact.wall_time,
        time_approx: approx.wall_time,
    })
}

fn timed(repeats: usize, mut solve: impl FnMut() -> Result<SolveOutcome>) -> Result<SolveOutcome> {
    let mut best = solve()?;
    for _ in 1..repeats.max(1) {
        let next = solve()?;
        if next.wall_time < best.wall_time {
            best.wall_time = next.wall_time;
        }
    }
    Ok(best)
}

/// Runs every `(n, trial)` pair; failures become error rows.
///
/// Rows come back sorted by `(n, trial)` whatever the schedule.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    if let Some(&bad) = config.n_values.iter().find(|&&n| n <= config.k) {
        return Err(Error::InvalidParameter(format!(
            "every n must exceed k = {}, got n = {bad}",
            config.k
        )));
    }
    let jobs: Vec<(usize, usize)> = config
        .n_values
        .iter()
        .flat_map(|&n| (0..config.seeds_per_n).map(move |t| (n, t)))
        .collect();
    let rows = par::map_indexed(jobs.len(), |i| {
        let (n, trial) = jobs[i];
        let p = config.p_rule.p_for(n);
        let seed = run_seed(config.base_seed, n, trial);
        let outcome = run_single(
            n,
            config.k,
            p,
            config.gamma_target,
            config.noise,
            seed,
            config.timing_repeats,
        )
        .map_err(|e| e.to_string());
        ExperimentRow {
            n,
            k: config.k,
            p,
            seed,
            outcome,
        }
    });
    Ok(ExperimentReport { rows })
}

/// Formats a double as the shortest decimal that parses back to the same bits.
pub fn format_f64(v: f64) -> String {
    format!("{v:?}")
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.sort_by(f64::total_cmp);
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        0.5 * (values[mid - 1] + values[mid])
    }
}

fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        f64::NAN
    } else {
        values.iter().sum::<f64>() / values.len() as f64
    }
}

impl ExperimentReport {
    /// CSV with LF line endings; failed runs carry `NaN` metrics.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(CSV_HEADER);
        out.push('\n');
        for row in &self.rows {
            let (obj, sol, te, ta) = match &row.outcome {
                Ok(m) => (
                    m.objective_error,
                    m.solution_error,
                    m.time_exact.as_secs_f64(),
                    m.time_approx.as_secs_f64(),
                ),
                Err(_) => (f64::NAN, f64::NAN, f64::NAN, f64::NAN),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                row.n,
                row.k,
                row.p,
                row.seed,
                format_f64(obj),
                format_f64(sol),
                format_f64(te),
                format_f64(ta)
            );
        }
        out
    }

    /// Aggregates per `n`, in ascending `n`.
    pub fn summary(&self) -> Vec<NSummary> {
        let mut ns: Vec<usize> = self.rows.iter().map(|r| r.n).collect();
        ns.sort_unstable();
        ns.dedup();
        ns.into_iter()
            .map(|n| {
                let rows: Vec<&ExperimentRow> = self.rows.iter().filter(|r| r.n == n).collect();
                let ok: Vec<&RunMetrics> = rows
                    .iter()
                    .filter_map(|r| r.outcome.as_ref().ok())
                    .collect();
                let mut obj: Vec<f64> = ok.iter().map(|m| m.objective_error).collect();
                let mut sol: Vec<f64> = ok.iter().map(|m| m.solution_error).collect();
                let mut ratio: Vec<f64> = ok
                    .iter()
                    .map(|m| m.time_approx.as_secs_f64() / m.time_exact.as_secs_f64())
                    .collect();
                NSummary {
                    n,
                    runs: rows.len(),
                    failures: rows.len() - ok.len(),
                    mean_objective_error: mean(&obj),
                    median_objective_error: median(&mut obj),
                    mean_solution_error: mean(&sol),
                    median_solution_error: median(&mut sol),
                    median_time_ratio: median(&mut ratio),
                }
            })
            .collect()
    }
}
