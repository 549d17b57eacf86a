//! Argument definitions and command dispatch.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use trunclsq_core::bench::{
    format_f64, run_experiment, synthetic_problem, ExperimentConfig, PRule, DEFAULT_NOISE,
};
use trunclsq_core::dense::thin_svd;
use trunclsq_core::regression::{
    approx_truncated_solve, exact_truncated_solve_with, tikhonov_solve_with, SolveOutcome,
};
use trunclsq_core::theory::{choose_p, GapProfile};
use trunclsq_core::{certify, par, RngSeed};

use crate::mtx::{self, MtxError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] trunclsq_core::Error),
    #[error(transparent)]
    Mtx(#[from] MtxError),
    #[error("{0}")]
    Io(#[from] io::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "trunclsq",
    version,
    about = "SVD-truncated least squares, exact and randomized"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Randomized truncated solve
    Solve(SolveArgs),
    /// Truncated solve from the full thin SVD
    Exact(ExactArgs),
    /// Tikhonov solve with per-component weights
    Tikhonov(TikhonovArgs),
    /// Run the certificate suites on random instances
    Certify(CertifyArgs),
    /// Accuracy and timing sweep over synthetic problems, as CSV
    Bench(BenchArgs),
    /// Write a synthetic problem as Matrix Market files
    Gen(GenArgs),
}

#[derive(Debug, Args)]
pub struct SeedArg {
    /// Random seed
    #[arg(long, env = "TRUNCLSQ_SEED", default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct Problem {
    /// Matrix A (Matrix Market)
    pub matrix: PathBuf,
    /// Right-hand side b (Matrix Market, one column)
    pub rhs: PathBuf,
    /// Write x here as Matrix Market instead of printing it
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub problem: Problem,
    /// Truncation rank
    #[arg(long)]
    pub k: usize,
    /// Power steps
    #[arg(long, required_unless_present = "epsilon", conflicts_with_all = ["epsilon", "delta"])]
    pub p: Option<usize>,
    /// Target additive residual error; picks p with --delta
    #[arg(long, requires = "delta")]
    pub epsilon: Option<f64>,
    /// Failure probability scale; picks p with --epsilon
    #[arg(long, requires = "epsilon")]
    pub delta: Option<f64>,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub problem: Problem,
    #[arg(long)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct TikhonovArgs {
    #[command(flatten)]
    pub problem: Problem,
    /// One weight per singular value, or a single weight for all
    #[arg(
        long,
        value_delimiter = ',',
        required = true,
        allow_negative_numbers = true
    )]
    pub lambda: Vec<f64>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    /// Instances per suite
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Problem sizes
    #[arg(
        long = "n",
        value_delimiter = ',',
        default_value = "100,200,300,400,500"
    )]
    pub n_values: Vec<usize>,
    #[arg(long, default_value_t = 20)]
    pub k: usize,
    /// Planted gap sigma_{k+1} / sigma_k
    #[arg(long, default_value_t = 0.99)]
    pub gamma: f64,
    #[arg(long, default_value_t = DEFAULT_NOISE)]
    pub noise: f64,
    /// Runs per size
    #[arg(long, default_value_t = 20)]
    pub seeds: usize,
    /// Fixed power steps instead of ceil(p_scale * ln n)
    #[arg(long, conflicts_with = "p_scale")]
    pub p: Option<usize>,
    #[arg(long, default_value_t = 10.0)]
    pub p_scale: f64,
    /// Timed repetitions per solve; the minimum is kept
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Worker threads for independent runs
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// CSV destination; standard output when absent
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub seed: SeedArg,
}

#[derive(Debug, Args)]
pub struct GenArgs {
    /// Destination for A
    pub matrix: PathBuf,
    /// Destination for b
    pub rhs: PathBuf,
    #[arg(long = "n")]
    pub n: usize,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value_t = 0.99)]
    pub gamma: f64,
    #[arg(long, default_value_t = DEFAULT_NOISE)]
    pub noise: f64,
    #[command(flatten)]
    pub seed: SeedArg,
}

fn positive(name: &str, v: usize) -> Result<(), CliError> {
    if v == 0 {
        return Err(CliError::Usage(format!("--{name} must be at least 1")));
    }
    Ok(())
}

fn summary_line(out: &mut dyn Write, key: &str, value: impl std::fmt::Display) -> io::Result<()> {
    writeln!(out, "# {key}: {value}")
}

fn emit_solution(
    out: &mut dyn Write,
    outcome: &SolveOutcome,
    dest: &Option<PathBuf>,
) -> Result<(), CliError> {
    match dest {
        Some(path) => mtx::save_vector(path, &outcome.x)?,
        None => {
            for v in outcome.x.as_slice() {
                writeln!(out, "{}", format_f64(*v))?;
            }
        }
    }
    summary_line(out, "method", outcome.method.as_str())?;
    if let Some(k) = outcome.k {
        summary_line(out, "k", k)?;
    }
    if let Some(p) = outcome.p {
        summary_line(out, "p", p)?;
    }
    summary_line(out, "residual", format_f64(outcome.residual_norm))?;
    summary_line(out, "rhs_norm", format_f64(outcome.rhs_norm))?;
    summary_line(
        out,
        "relative_residual",
        format_f64(outcome.relative_residual()),
    )?;
    Ok(())
}

/// Runs one command. `Ok(false)` means the command ran but reported failure.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<bool, CliError> {
    match &cli.command {
        Command::Solve(args) => solve(args, out).map(|_| true),
        Command::Exact(args) => exact(args, out).map(|_| true),
        Command::Tikhonov(args) => tikhonov(args, out).map(|_| true),
        Command::Certify(args) => certify_cmd(args, out),
        Command::Bench(args) => bench(args, out, err).map(|_| true),
        Command::Gen(args) => gen(args, out).map(|_| true),
    }
}

fn solve(args: &SolveArgs, out: &mut dyn Write) -> Result<(), CliError> {
    positive("k", args.k)?;
    let a = mtx::load_matrix(&args.problem.matrix)?;
    let b = mtx::load_vector(&args.problem.rhs)?;
    let (p, profile) = match (args.p, args.epsilon, args.delta) {
        (Some(p), _, _) => (p, None),
        (None, Some(eps), Some(delta)) => {
            let profile = GapProfile::measure(&a, args.k)?;
            (choose_p(eps, delta, &profile)?, Some(profile))
        }
        _ => {
            return Err(CliError::Usage(
                "give --p, or both --epsilon and --delta".into(),
            ))
        }
    };
    let outcome = approx_truncated_solve(&a, &b, args.k, p, RngSeed::new(args.seed.seed))?;
    emit_solution(out, &outcome, &args.problem.output)?;
    summary_line(out, "seed", args.seed.seed)?;
    if let Some(g) = profile {
        summary_line(out, "gamma_k", format_f64(g.gamma_k))?;
    }
    Ok(())
}

fn exact(args: &ExactArgs, out: &mut dyn Write) -> Result<(), CliError> {
    positive("k", args.k)?;
    let a = mtx::load_matrix(&args.problem.matrix)?;
    let b = mtx::load_vector(&args.problem.rhs)?;
    let svd = thin_svd(&a)?;
    let outcome = exact_truncated_solve_with(&a, &b, args.k, &svd)?;
    emit_solution(out, &outcome, &args.problem.output)
}

fn tikhonov(args: &TikhonovArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let a = mtx::load_matrix(&args.problem.matrix)?;
    let b = mtx::load_vector(&args.problem.rhs)?;
    let svd = thin_svd(&a)?;
    let lambdas = match args.lambda.as_slice() {
        [single] => vec![*single; svd.rank()],
        many => many.to_vec(),
    };
    let outcome = tikhonov_solve_with(&a, &b, &lambdas, &svd)?;
    emit_solution(out, &outcome, &args.problem.output)?;
    summary_line(out, "rank", svd.rank())?;
    Ok(())
}

fn certify_cmd(args: &CertifyArgs, out: &mut dyn Write) -> Result<bool, CliError> {
    positive("trials", args.trials)?;
    let suites = certify::run_all(args.trials, args.seed.seed);
    let mut ok = true;
    for suite in &suites {
        writeln!(
            out,
            "{}: {}/{} {}",
            suite.name,
            suite.passed,
            suite.trials,
            if suite.all_passed() { "pass" } else { "FAIL" }
        )?;
        for f in &suite.failures {
            writeln!(out, "  {f}")?;
        }
        ok &= suite.all_passed();
    }
    Ok(ok)
}

fn bench(args: &BenchArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    if args.n_values.is_empty() {
        return Err(CliError::Usage("--n needs at least one size".into()));
    }
    positive("k", args.k)?;
    positive("seeds", args.seeds)?;
    positive("jobs", args.jobs)?;
    positive("repeats", args.repeats)?;
    if let Some(&n) = args.n_values.iter().find(|&&n| n <= args.k) {
        return Err(CliError::Usage(format!(
            "every --n must exceed --k, got {n}"
        )));
    }
    let mut cfg = ExperimentConfig::new(
        args.n_values.clone(),
        args.k,
        args.gamma,
        args.seeds,
        args.seed.seed,
    );
    cfg.noise = args.noise;
    cfg.timing_repeats = args.repeats;
    cfg.p_rule = match args.p {
        Some(p) => PRule::Fixed(p),
        None => PRule::LogScale(args.p_scale),
    };
    let report = par::with_threads(args.jobs, || run_experiment(&cfg))?;
    let csv = report.to_csv();
    match &args.output {
        Some(path) => fs::write(path, csv)?,
        None => out.write_all(csv.as_bytes())?,
    }
    for s in report.summary() {
        writeln!(
            err,
            "n={} runs={} failed={} median_objective_error={} median_solution_error={} median_time_ratio={}",
            s.n,
            s.runs,
            s.failures,
            format_f64(s.median_objective_error),
            format_f64(s.median_solution_error),
            format_f64(s.median_time_ratio)
        )?;
    }
    for row in &report.rows {
        if let Err(e) = &row.outcome {
            writeln!(err, "n={} seed={}: {e}", row.n, row.seed)?;
        }
    }
    Ok(())
}

fn gen(args: &GenArgs, out: &mut dyn Write) -> Result<(), CliError> {
    positive("k", args.k)?;
    let problem = synthetic_problem(
        args.n,
        args.k,
        args.gamma,
        args.noise,
        RngSeed::new(args.seed.seed),
    )?;
    mtx::save_matrix(&args.matrix, &problem.a)?;
    mtx::save_vector(&args.rhs, &problem.b)?;
    let g = problem.gap_profile;
    summary_line(out, "n", g.n)?;
    summary_line(out, "k", g.k)?;
    summary_line(out, "sigma_1", format_f64(g.sigma_1))?;
    summary_line(out, "sigma_k", format_f64(g.sigma_k))?;
    summary_line(out, "sigma_k_plus_1", format_f64(g.sigma_k_plus_1))?;
    summary_line(out, "gamma_k", format_f64(g.gamma_k))?;
    summary_line(out, "seed", args.seed.seed)?;
    Ok(())
}
