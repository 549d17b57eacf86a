//! Least-squares solvers built on the SVD: truncated (exact and randomized),
//! Tikhonov with per-component weights, and the full minimum-norm solution.

use std::time::{Duration, Instant};

use crate::dense::{thin_svd, truncate, DenseMatrix, ThinSvd, TruncatedFactorization, Vector};
use crate::error::{Error, Result};
use crate::sketch::RngSeed;
use crate::subspace::approx_truncated_svd;
use crate::tolerance::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    ExactTruncated,
    ApproxTruncated,
    Tikhonov,
    FullLs,
}

impl SolveMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SolveMethod::ExactTruncated => "exact_truncated",
            SolveMethod::ApproxTruncated => "approx_truncated",
            SolveMethod::Tikhonov => "tikhonov",
            SolveMethod::FullLs => "full_ls",
        }
    }
}

/// A solution together with its residual, recomputed from `(A, x, b)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveOutcome {
    pub x: Vector,
    /// `||A x - b||_2`
    pub residual_norm: f64,
    /// `||b||_2`
    pub rhs_norm: f64,
    pub method: SolveMethod,
    pub k: Option<usize>,
    pub p: Option<usize>,
    pub wall_time: Duration,
}

impl SolveOutcome {
    fn new(
        a: &DenseMatrix,
        b: &Vector,
        x: Vec<f64>,
        method: SolveMethod,
        k: Option<usize>,
        p: Option<usize>,
        wall_time: Duration,
    ) -> Result<Self> {
        let x = Vector::new(x)?;
        let residual_norm = residual_norm(a, &x, b)?;
        Ok(Self {
            x,
            residual_norm,
            rhs_norm: b.norm(),
            method,
            k,
            p,
            wall_time,
        })
    }

    /// `residual_norm / rhs_norm`, or the raw residual when `b = 0`.
    pub fn relative_residual(&self) -> f64 {
        if self.rhs_norm > 0.0 {
            self.residual_norm / self.rhs_norm
        } else {
            self.residual_norm
        }
    }
}

/// `||A x - b||_2`.
pub fn residual_norm(a: &DenseMatrix, x: &Vector, b: &Vector) -> Result<f64> {
    let ax = a.matvec(x.as_slice())?;
    check_rhs(a, b)?;
    let r: Vec<f64> = ax.iter().zip(b.as_slice()).map(|(p, q)| p - q).collect();
    Ok(Vector::from_vec(r).norm())
}

fn check_rhs(a: &DenseMatrix, b: &Vector) -> Result<()> {
    if b.dim() != a.rows() {
        return Err(Error::DimensionMismatch {
            op: "right-hand side",
            left: a.shape(),
            right: (b.dim(), 1),
        });
    }
    Ok(())
}

/// `x_k = sum_{i<=k} (u_i^T b / sigma_i) v_i` from the thin SVD of `A`.
pub fn exact_truncated_solve(a: &DenseMatrix, b: &Vector, k: usize) -> Result<SolveOutcome> {
    check_rhs(a, b)?;
    let start = Instant::now();
    let svd = thin_svd(a)?;
    let x = truncate(&svd, k)?.apply_pseudo_inverse(b.as_slice())?;
    let elapsed = start.elapsed();
    SolveOutcome::new(a, b, x, SolveMethod::ExactTruncated, Some(k), None, elapsed)
}

/// [`exact_truncated_solve`] reusing a precomputed factorization of `A`.
pub fn exact_truncated_solve_with(
    a: &DenseMatrix,
    b: &Vector,
    k: usize,
    svd: &ThinSvd,
) -> Result<SolveOutcome> {
    check_rhs(a, b)?;
    let start = Instant::now();
    let x = truncate(svd, k)?.apply_pseudo_inverse(b.as_slice())?;
    let elapsed = start.elapsed();
    SolveOutcome::new(a, b, x, SolveMethod::ExactTruncated, Some(k), None, elapsed)
}

/// `x~_k = V~_k diag(1/sigma~) U~_k^T b` with the factors from
/// [`approx_truncated_svd`].
pub fn approx_truncated_solve(
    a: &DenseMatrix,
    b: &Vector,
    k: usize,
    p: usize,
    seed: RngSeed,
) -> Result<SolveOutcome> {
    check_rhs(a, b)?;
    let start = Instant::now();
    let factors = approx_truncated_svd(a, k, p, seed)?;
    let x = solve_with_factors(&factors, b)?;
    let elapsed = start.elapsed();
    SolveOutcome::new(
        a,
        b,
        x,
        SolveMethod::ApproxTruncated,
        Some(k),
        Some(p),
        elapsed,
    )
}

/// Applies the pseudo-inverse of a rank-k factorization to `b`, refusing
/// factorizations whose smallest kept singular value is negligible.
pub fn solve_with_factors(f: &TruncatedFactorization, b: &Vector) -> Result<Vec<f64>> {
    let first = f.sigma[0];
    let last = f.sigma[f.k() - 1];
    let ratio = if first > 0.0 { last / first } else { 0.0 };
    if ratio <= Tolerances::DEFAULT.ill_conditioned_rel {
        return Err(Error::IllConditionedTruncation { ratio });
    }
    f.apply_pseudo_inverse(b.as_slice())
}

/// `x_lambda = sum_i sigma_i^2 / (sigma_i^2 + lambda_i^2) * (u_i^T b / sigma_i) v_i`.
///
/// `lambdas` carries one weight per singular triple of `A`.
pub fn tikhonov_solve(a: &DenseMatrix, b: &Vector, lambdas: &[f64]) -> Result<SolveOutcome> {
    let start = Instant::now();
    let svd = thin_svd(a)?;
    tikhonov_inner(a, b, lambdas, &svd, start)
}

pub fn tikhonov_solve_with(
    a: &DenseMatrix,
    b: &Vector,
    lambdas: &[f64],
    svd: &ThinSvd,
) -> Result<SolveOutcome> {
    tikhonov_inner(a, b, lambdas, svd, Instant::now())
}

fn tikhonov_inner(
    a: &DenseMatrix,
    b: &Vector,
    lambdas: &[f64],
    svd: &ThinSvd,
    start: Instant,
) -> Result<SolveOutcome> {
    check_rhs(a, b)?;
    if lambdas.len() != svd.rank() {
        return Err(Error::DimensionMismatch {
            op: "tikhonov weights",
            left: (svd.rank(), 1),
            right: (lambdas.len(), 1),
        });
    }
    if let Some(bad) = lambdas.iter().find(|l| !(l.is_finite() && **l >= 0.0)) {
        return Err(Error::InvalidParameter(format!(
            "tikhonov weight {bad} must be finite and nonnegative"
        )));
    }
    let projections = svd.u.transpose_matvec(b.as_slice())?;
    let coeffs: Vec<f64> = projections
        .iter()
        .zip(&svd.sigma)
        .zip(lambdas)
        .map(|((c, &s), &l)| {
            // s / (s^2 + l^2) == filter * (1 / s), without squaring overflow
            let r = l / s;
            c / (s * (1.0 + r * r))
        })
        .collect();
    let x = svd.v.matvec(&coeffs)?;
    let elapsed = start.elapsed();
    SolveOutcome::new(a, b, x, SolveMethod::Tikhonov, None, None, elapsed)
}

/// Minimum-norm least-squares solution `A^+ b`.
pub fn full_ls_solve(a: &DenseMatrix, b: &Vector) -> Result<SolveOutcome> {
    let start = Instant::now();
    let svd = thin_svd(a)?;
    full_ls_inner(a, b, &svd, start)
}

pub fn full_ls_solve_with(a: &DenseMatrix, b: &Vector, svd: &ThinSvd) -> Result<SolveOutcome> {
    full_ls_inner(a, b, svd, Instant::now())
}

fn full_ls_inner(
    a: &DenseMatrix,
    b: &Vector,
    svd: &ThinSvd,
    start: Instant,
) -> Result<SolveOutcome> {
    check_rhs(a, b)?;
    let x = truncate(svd, svd.rank())?.apply_pseudo_inverse(b.as_slice())?;
    let elapsed = start.elapsed();
    SolveOutcome::new(a, b, x, SolveMethod::FullLs, None, None, elapsed)
}

/// Relative distance between the exact and approximate truncated solutions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionError {
    /// `||x_k - x~_k|| / ||x_k||`, or `||x~_k||` when `x_k = 0`.
    pub value: f64,
    /// Set when `x_k = 0` and the absolute fallback was used.
    pub absolute: bool,
}

pub fn solution_error(exact: &Vector, approx: &Vector) -> SolutionError {
    let denom = exact.norm();
    if denom == 0.0 {
        SolutionError {
            value: approx.norm(),
            absolute: true,
        }
    } else {
        SolutionError {
            value: exact.sub(approx).norm() / denom,
            absolute: false,
        }
    }
}
