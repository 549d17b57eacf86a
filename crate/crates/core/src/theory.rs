//! Checkable forms of the error analysis for the randomized solver.
//!
//! * [`choose_p`] picks the number of power steps that guarantees an additive
//!   residual error of `epsilon * ||b||` with probability about `1 - 2.35 delta`.
//! * [`appendix_bound`] evaluates the deterministic subspace inequality
//!   `sigma_k(V_k^T S) * dist(U_k, U~_k) <= gamma_k^(2p+1) * sigma_1(V_tail^T S)`.
//! * [`error_chain`] evaluates the three deterministic inequalities that link
//!   the projection distance to the residual gap.
//! * [`lower_bound_instance`] builds a right-hand side on which any
//!   `b`-oblivious rank-k approximation pays an additive error.
//!
//! Every report carries its tolerance so a violation can be told apart from
//! roundoff.

use crate::dense::{
    matmul, matmul_tn, spectral_norm, thin_svd, truncate, DenseMatrix, ThinSvd,
    TruncatedFactorization, Vector,
};
use crate::error::{Error, Result};
use crate::regression::{residual_norm, solution_error, solve_with_factors};
use crate::sketch::RngSeed;
use crate::subspace::{approx_truncated_svd, approx_truncated_svd_with_sketch};
use crate::tolerance::Tolerances;

/// Absolute slack on the subspace inequality of [`appendix_bound`].
pub const APPENDIX_TOL: f64 = 1e-8;
/// Relative slack on the error-chain inequalities.
pub const CHAIN_REL_TOL: f64 = 1e-8;
/// `epsilon*` at or below this marks the approximation as exact.
pub const LOWER_BOUND_DEGENERATE: f64 = 1e-12;

/// Singular values around the truncation index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapProfile {
    pub sigma_1: f64,
    pub sigma_k: f64,
    pub sigma_k_plus_1: f64,
    /// `sigma_{k+1} / sigma_k`
    pub gamma_k: f64,
    pub n: usize,
    pub k: usize,
}

impl GapProfile {
    pub fn new(
        sigma_1: f64,
        sigma_k: f64,
        sigma_k_plus_1: f64,
        n: usize,
        k: usize,
    ) -> Result<Self> {
        let ordered = sigma_1 >= sigma_k && sigma_k >= sigma_k_plus_1 && sigma_k_plus_1 >= 0.0;
        if !(sigma_k > 0.0 && ordered) || n == 0 || k == 0 {
            return Err(Error::InvalidParameter(format!(
                "gap profile needs sigma_1 >= sigma_k > 0 and sigma_k >= sigma_k+1 >= 0, \
                 got ({sigma_1}, {sigma_k}, {sigma_k_plus_1})"
            )));
        }
        Ok(Self {
            sigma_1,
            sigma_k,
            sigma_k_plus_1,
            gamma_k: sigma_k_plus_1 / sigma_k,
            n,
            k,
        })
    }

    /// Profile of a factored matrix with `n` columns; `sigma_{k+1} = 0` when
    /// the numerical rank is exactly `k`.
    pub fn from_svd(svd: &ThinSvd, n: usize, k: usize) -> Result<Self> {
        if k == 0 || k > svd.rank() {
            return Err(Error::InvalidTruncation {
                k,
                rank: svd.rank(),
            });
        }
        let next = svd.sigma.get(k).copied().unwrap_or(0.0);
        Self::new(svd.sigma[0], svd.sigma[k - 1], next, n, k)
    }

    pub fn measure(a: &DenseMatrix, k: usize) -> Result<Self> {
        Self::from_svd(&thin_svd(a)?, a.cols(), k)
    }
}

/// Outcome of one inequality check: `satisfied <=> measured <= bound + tol`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub label: String,
    pub measured: f64,
    pub bound: f64,
    pub tol: f64,
    pub satisfied: bool,
}

impl BoundReport {
    pub fn new(label: impl Into<String>, measured: f64, bound: f64, tol: f64) -> Self {
        Self {
            label: label.into(),
            measured,
            bound,
            tol,
            satisfied: measured <= bound + tol,
        }
    }

    /// `bound - measured`; negative means violated before tolerance.
    pub fn slack(&self) -> f64 {
        self.bound - self.measured
    }
}

fn check_unit_interval(name: &str, v: f64) -> Result<()> {
    // closed at 1 so that the degenerate epsilon = delta = 1 evaluations work
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "{name} = {v} must lie in (0, 1]"
        )));
    }
    Ok(())
}

/// Smallest `p` with
/// `p >= ln(eps * delta * sigma_k^2 / sigma_1^2 / (12 n)) / ln(gamma_k^2)`.
///
/// Evaluated in log space so tiny arguments do not underflow.
pub fn choose_p(epsilon: f64, delta: f64, profile: &GapProfile) -> Result<usize> {
    check_unit_interval("epsilon", epsilon)?;
    check_unit_interval("delta", delta)?;
    let gamma = profile.gamma_k;
    if gamma == 0.0 {
        return Ok(0);
    }
    if gamma >= 1.0 {
        return Err(Error::NoSpectralGap { gamma });
    }
    let numerator = epsilon.ln() + delta.ln() + 2.0 * profile.sigma_k.ln()
        - 2.0 * profile.sigma_1.ln()
        - 12f64.ln()
        - (profile.n as f64).ln();
    let p = (numerator / (2.0 * gamma.ln())).ceil();
    Ok(p.max(0.0) as usize)
}

/// Power steps that make `dist(U_k, U~_k) <= epsilon` with probability about
/// `1 - 2.35 delta`: `p >= ln(eps * delta / (4 n)) / ln(gamma_k^2)`.
pub fn projection_p(epsilon: f64, delta: f64, n: usize, gamma_k: f64) -> Result<usize> {
    check_unit_interval("epsilon", epsilon)?;
    check_unit_interval("delta", delta)?;
    if gamma_k == 0.0 {
        return Ok(0);
    }
    if gamma_k >= 1.0 {
        return Err(Error::NoSpectralGap { gamma: gamma_k });
    }
    let numerator = epsilon.ln() + delta.ln() - 4f64.ln() - (n as f64).ln();
    Ok((numerator / (2.0 * gamma_k.ln())).ceil().max(0.0) as usize)
}

/// `||U U^T - W W^T||_2` for two orthonormal bases of equal dimension,
/// computed as `||(I - U U^T) W||_2`.
pub fn projection_distance(u: &DenseMatrix, w: &DenseMatrix) -> Result<f64> {
    if u.shape() != w.shape() {
        return Err(Error::DimensionMismatch {
            op: "projection_distance",
            left: u.shape(),
            right: w.shape(),
        });
    }
    let limit = Tolerances::DEFAULT.orthonormal;
    for m in [u, w] {
        let deviation = m.orthonormality_error();
        if deviation > limit {
            return Err(Error::NotOrthonormal { deviation });
        }
    }
    let coeff = matmul_tn(u, w)?;
    let resid = w.sub(&matmul(u, &coeff)?)?;
    Ok(spectral_norm(&resid).min(1.0))
}

/// Deterministic subspace inequality for an explicit sketch `S` (`n x k`):
/// `sigma_k(V_k^T S) * dist(U_k, U~_k) <= gamma_k^(2p+1) * sigma_1(V_tail^T S)`.
///
/// `U~_k` is rebuilt from this `S`. When `A` has numerical rank exactly `k`
/// there is no trailing subspace and both sides are reported as zero.
pub fn appendix_bound(a: &DenseMatrix, s: &DenseMatrix, k: usize, p: usize) -> Result<BoundReport> {
    let svd = thin_svd(a)?;
    appendix_bound_with(a, &svd, s, k, p)
}

/// [`appendix_bound`] reusing the thin SVD of `A`.
pub fn appendix_bound_with(
    a: &DenseMatrix,
    svd: &ThinSvd,
    s: &DenseMatrix,
    k: usize,
    p: usize,
) -> Result<BoundReport> {
    let label =
        format!("appendix: sigma_k(Vk'S)*dist <= gamma^(2p+1)*sigma_1(Vtail'S), k={k} p={p}");
    if s.shape() != (a.cols(), k) {
        return Err(Error::DimensionMismatch {
            op: "appendix_bound sketch",
            left: (a.cols(), k),
            right: s.shape(),
        });
    }
    let rank = svd.rank();
    if k == 0 || k > rank {
        return Err(Error::InvalidTruncation { k, rank });
    }
    if rank == k {
        return Ok(BoundReport::new(label, 0.0, 0.0, APPENDIX_TOL));
    }

    let vk = svd.v.leading_columns(k);
    let vtail = svd.v.column_range(k, rank);
    let head = matmul_tn(&vk, s)?;
    let head_min = match thin_svd(&head) {
        Ok(f) if f.rank() == k => f.sigma[k - 1],
        _ => return Err(Error::DegenerateSketch),
    };
    let tail_max = spectral_norm(&matmul_tn(&vtail, s)?);
    let gamma = svd.sigma[k] / svd.sigma[k - 1];

    let approx = approx_truncated_svd_with_sketch(a, s, p)?;
    let dist = projection_distance(&svd.u.leading_columns(k), &approx.u)?;

    let measured = head_min * dist;
    let bound = gamma.powi(2 * p as i32 + 1) * tail_max;
    Ok(BoundReport::new(label, measured, bound, APPENDIX_TOL))
}

/// The three deterministic links between the projection distance and the
/// residual gap, evaluated on one seeded run:
///
/// 1. `||A (x~_k - x_k)|| <= 2 sigma_1^2 / (sigma_k(A~_k) sigma_k) * dist * ||b||`
/// 2. `sigma_k - sigma_1 * dist <= sigma_k(A~_k)`
/// 3. `||A~_k - A_k||_2 <= sigma_1 * dist`
pub fn error_chain(
    a: &DenseMatrix,
    b: &Vector,
    k: usize,
    p: usize,
    seed: RngSeed,
) -> Result<Vec<BoundReport>> {
    let svd = thin_svd(a)?;
    let approx = approx_truncated_svd(a, k, p, seed)?;
    error_chain_with(a, b, &svd, &approx)
}

/// [`error_chain`] for given exact and approximate factorizations.
pub fn error_chain_with(
    a: &DenseMatrix,
    b: &Vector,
    svd: &ThinSvd,
    approx: &TruncatedFactorization,
) -> Result<Vec<BoundReport>> {
    let k = approx.k();
    let exact = truncate(svd, k)?;
    let x_exact = Vector::new(exact.apply_pseudo_inverse(b.as_slice())?)?;
    let x_approx = Vector::new(solve_with_factors(approx, b)?)?;
    let dist = projection_distance(&exact.u, &approx.u)?;

    let sigma_1 = svd.sigma[0];
    let sigma_k = svd.sigma[k - 1];
    let approx_k = approx.sigma[k - 1];
    let b_norm = b.norm();
    let kappa = sigma_1 / sigma_k;

    let delta = Vector::new(a.matvec(x_approx.sub(&x_exact).as_slice())?)?.norm();
    let delta_bound = 2.0 * sigma_1 * sigma_1 / (approx_k * sigma_k) * dist * b_norm;
    let diff = spectral_norm(&approx.reconstruct().sub(&exact.reconstruct())?);

    Ok(vec![
        BoundReport::new(
            "delta: ||A(x~-x)|| <= 2 s1^2/(s~k sk) * dist * ||b||",
            delta,
            delta_bound,
            CHAIN_REL_TOL * kappa * kappa * b_norm,
        ),
        BoundReport::new(
            "weyl: sk - s1*dist <= s~k",
            sigma_k - sigma_1 * dist,
            approx_k,
            CHAIN_REL_TOL * sigma_1,
        ),
        BoundReport::new(
            "projection: ||A~k - Ak|| <= s1 * dist",
            diff,
            sigma_1 * dist,
            CHAIN_REL_TOL * sigma_1,
        ),
    ])
}

/// Per-trial outcome of the two high-probability guarantees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GuaranteeTrial {
    /// `(||A x~ - b|| - ||A x_k - b||) / ||b||`
    pub objective_gap: f64,
    /// `||x_k - x~_k|| / ||x_k||`
    pub solution_error: f64,
    /// Additive residual guarantee held.
    pub residual_ok: bool,
    /// Relative solution guarantee `<= 4/3 epsilon` held.
    pub solution_ok: bool,
}

/// Runs the randomized solver once and scores it against the exact one.
pub fn guarantee_trial(
    a: &DenseMatrix,
    svd: &ThinSvd,
    b: &Vector,
    k: usize,
    p: usize,
    epsilon: f64,
    seed: RngSeed,
) -> Result<GuaranteeTrial> {
    let exact = Vector::new(truncate(svd, k)?.apply_pseudo_inverse(b.as_slice())?)?;
    let approx_f = approx_truncated_svd(a, k, p, seed)?;
    let approx = Vector::new(solve_with_factors(&approx_f, b)?)?;
    let b_norm = b.norm();
    let r_exact = residual_norm(a, &exact, b)?;
    let r_approx = residual_norm(a, &approx, b)?;
    let err = solution_error(&exact, &approx).value;
    Ok(GuaranteeTrial {
        objective_gap: (r_approx - r_exact) / b_norm,
        solution_error: err,
        residual_ok: r_approx <= r_exact + epsilon * b_norm,
        solution_ok: err <= 4.0 / 3.0 * epsilon,
    })
}

/// Adversarial right-hand side for a fixed rank-k approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundInstance {
    /// `b = A_k z`, `z` the top right singular vector of `(I - A_k A~_k^+) A_k`.
    pub b: Vector,
    /// `||(I - A_k A~_k^+) A_k||_2 / ||A_k||_2`
    pub epsilon_star: f64,
    /// `epsilon*` is negligible: the approximation reproduces `A_k^+`.
    pub degenerate: bool,
}

/// Builds `b` such that `x_k` fits it exactly while `A~_k^+ b` leaves a
/// residual of at least `epsilon* ||b||`.
pub fn lower_bound_instance(
    a: &DenseMatrix,
    approx: &TruncatedFactorization,
    k: usize,
) -> Result<LowerBoundInstance> {
    if approx.k() != k {
        return Err(Error::InvalidParameter(format!(
            "approximation has rank {} but k = {k}",
            approx.k()
        )));
    }
    let svd = thin_svd(a)?;
    let exact = truncate(&svd, k)?;
    let a_k = exact.reconstruct();
    let norm_ak = svd.sigma[0];

    // (I - A_k A~^+) A_k = A_k - A_k (A~^+ A_k)
    let cross = matmul(&approx.pseudo_inverse(), &a_k)?;
    let m = a_k.sub(&matmul(&a_k, &cross)?)?;

    let top = if m.is_zero() {
        None
    } else {
        Some(thin_svd(&m)?)
    };
    let epsilon_star = top.as_ref().map_or(0.0, |f| f.sigma[0] / norm_ak);
    let degenerate = epsilon_star <= LOWER_BOUND_DEGENERATE;
    let z = match &top {
        Some(f) if !degenerate => f.v.col(0).to_vec(),
        _ => exact.v.col(0).to_vec(),
    };
    let b = Vector::new(a_k.matvec(&z)?)?;
    Ok(LowerBoundInstance {
        b,
        epsilon_star,
        degenerate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::matmul_nt;
    use crate::sketch::{gaussian_matrix, gaussian_vector};

    fn profile(s1: f64, sk: f64, gamma: f64, n: usize) -> GapProfile {
        GapProfile::new(s1, sk, gamma * sk, n, 1).unwrap()
    }

    #[test]
    fn choose_p_reference_values() {
        // ln(0.1 * 0.1 * 0.25 / 1200) / ln(0.25) = 9.438...
        assert_eq!(
            choose_p(0.1, 0.1, &profile(1.0, 0.5, 0.5, 100)).unwrap(),
            10
        );
        // ln(1/12) / ln(e^-2) = 1.242...
        let p = choose_p(1.0, 1.0, &profile(1.0, 1.0, (-1.0f64).exp(), 1)).unwrap();
        assert_eq!(p, 2);
        assert_eq!(choose_p(0.1, 0.1, &profile(1.0, 0.5, 0.0, 100)).unwrap(), 0);
    }

    #[test]
    fn choose_p_errors() {
        assert!(matches!(
            choose_p(0.1, 0.1, &profile(1.0, 0.5, 1.0, 10)),
            Err(Error::NoSpectralGap { .. })
        ));
        assert!(choose_p(0.0, 0.1, &profile(1.0, 0.5, 0.5, 10)).is_err());
        assert!(choose_p(0.1, 1.5, &profile(1.0, 0.5, 0.5, 10)).is_err());
    }

    #[test]
    fn choose_p_survives_underflowing_argument() {
        let p = choose_p(1e-200, 1e-200, &profile(1e150, 1e-150, 0.5, 10)).unwrap();
        let expected = ((1e-200f64).ln() * 2.0 + 2.0 * (1e-150f64).ln()
            - 2.0 * (1e150f64).ln()
            - 12f64.ln()
            - 10f64.ln())
            / (2.0 * 0.5f64.ln());
        assert_eq!(p, expected.ceil() as usize);
    }

    #[test]
    fn gap_profile_validation() {
        assert!(GapProfile::new(1.0, 2.0, 0.5, 3, 1).is_err());
        assert!(GapProfile::new(1.0, 0.0, 0.0, 3, 1).is_err());
        let g = GapProfile::measure(&DenseMatrix::from_diag(&[4.0, 3.0, 2.0, 1.0]), 2).unwrap();
        assert_eq!((g.sigma_1, g.sigma_k, g.sigma_k_plus_1), (4.0, 3.0, 2.0));
        assert!((g.gamma_k - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn projection_distance_cases() {
        let e1 = DenseMatrix::from_rows(&[&[1.0], &[0.0]]);
        let e2 = DenseMatrix::from_rows(&[&[0.0], &[1.0]]);
        assert_eq!(projection_distance(&e1, &e1).unwrap(), 0.0);
        assert!((projection_distance(&e1, &e2).unwrap() - 1.0).abs() < 1e-15);
        let bad = DenseMatrix::from_rows(&[&[2.0], &[0.0]]);
        assert!(matches!(
            projection_distance(&bad, &e1),
            Err(Error::NotOrthonormal { .. })
        ));
    }

    #[test]
    fn projection_distance_is_sine_of_planted_rotation() {
        for &theta in &[0.1f64, 0.7, 1.3] {
            // span{e1, e3} vs span{cos e1 + sin e2, e3} in R^4
            let u = DenseMatrix::from_fn(4, 2, |i, j| match (i, j) {
                (0, 0) | (2, 1) => 1.0,
                _ => 0.0,
            });
            let w = DenseMatrix::from_fn(4, 2, |i, j| match (i, j) {
                (0, 0) => theta.cos(),
                (1, 0) => theta.sin(),
                (2, 1) => 1.0,
                _ => 0.0,
            });
            let d = projection_distance(&u, &w).unwrap();
            assert!((d - theta.sin()).abs() <= 1e-10, "{d} vs {}", theta.sin());
        }
    }

    #[test]
    fn appendix_bound_on_diagonal_fixture() {
        let a = DenseMatrix::from_diag(&[4.0, 3.0, 2.0, 1.0]);
        let s = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 1.0], &[1.0, 1.0], &[0.0, 0.0]]);
        let r = appendix_bound(&a, &s, 2, 0).unwrap();
        assert!(r.satisfied, "{r:?}");
        assert!(r.measured > 0.0);
    }

    #[test]
    fn appendix_bound_exact_rank_is_zero() {
        let a = matmul_nt(
            &gaussian_matrix(8, 2, RngSeed::new(1)),
            &gaussian_matrix(6, 2, RngSeed::new(2)),
        )
        .unwrap();
        let s = gaussian_matrix(6, 2, RngSeed::new(3));
        let r = appendix_bound(&a, &s, 2, 1).unwrap();
        assert_eq!((r.measured, r.bound), (0.0, 0.0));
        assert!(r.satisfied);
    }

    #[test]
    fn appendix_bound_degenerate_sketch() {
        let a = DenseMatrix::from_diag(&[4.0, 3.0, 2.0, 1.0]);
        // V_k^T S has a zero row
        let s = DenseMatrix::from_rows(&[&[1.0, 2.0], &[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(appendix_bound(&a, &s, 2, 0), Err(Error::DegenerateSketch));
    }

    #[test]
    fn error_chain_on_diagonal_and_exact_rank() {
        let a = DenseMatrix::from_diag(&[4.0, 3.0, 2.0, 1.0]);
        let b = Vector::new(vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        let reports = error_chain(&a, &b, 2, 3, RngSeed::new(5)).unwrap();
        assert_eq!(reports.len(), 3);
        assert!(reports.iter().all(|r| r.satisfied), "{reports:?}");

        let low = matmul_nt(
            &gaussian_matrix(9, 3, RngSeed::new(6)),
            &gaussian_matrix(7, 3, RngSeed::new(7)),
        )
        .unwrap();
        let b = gaussian_vector(9, RngSeed::new(8));
        let reports = error_chain(&low, &b, 3, 0, RngSeed::new(9)).unwrap();
        for r in &reports {
            assert!(r.satisfied, "{r:?}");
        }
        assert!(reports[0].measured <= 1e-10 * b.norm());
        let sigma_1 = thin_svd(&low).unwrap().sigma[0];
        assert!(reports[2].measured <= 1e-10 * sigma_1);
    }

    #[test]
    fn lower_bound_with_exact_factors_is_degenerate() {
        let a = DenseMatrix::from_diag(&[4.0, 3.0, 2.0, 1.0]);
        let exact = truncate(&thin_svd(&a).unwrap(), 2).unwrap();
        let inst = lower_bound_instance(&a, &exact, 2).unwrap();
        assert!(inst.degenerate);
        assert!(inst.epsilon_star <= 1e-12);
        assert!(inst.b.norm() <= 4.0 + 1e-12);
    }

    #[test]
    fn lower_bound_on_diagonal_fixture() {
        let a = DenseMatrix::from_diag(&[4.0, 3.0, 2.0, 1.0]);
        let approx = approx_truncated_svd(&a, 2, 0, RngSeed::new(12)).unwrap();
        let inst = lower_bound_instance(&a, &approx, 2).unwrap();
        assert!(!inst.degenerate);
        let b_norm = inst.b.norm();
        assert!(b_norm <= 4.0 * (1.0 + 1e-12));

        let svd = thin_svd(&a).unwrap();
        let x_exact = Vector::new(
            truncate(&svd, 2)
                .unwrap()
                .apply_pseudo_inverse(inst.b.as_slice())
                .unwrap(),
        )
        .unwrap();
        let x_approx = Vector::new(solve_with_factors(&approx, &inst.b).unwrap()).unwrap();
        assert!(residual_norm(&a, &x_exact, &inst.b).unwrap() <= 1e-8 * b_norm);
        assert!(
            residual_norm(&a, &x_approx, &inst.b).unwrap()
                >= inst.epsilon_star * b_norm - 1e-8 * b_norm
        );
    }

    #[test]
    fn lower_bound_rank_mismatch() {
        let a = DenseMatrix::from_diag(&[4.0, 3.0, 2.0, 1.0]);
        let approx = approx_truncated_svd(&a, 2, 0, RngSeed::new(12)).unwrap();
        assert!(lower_bound_instance(&a, &approx, 3).is_err());
    }
}
