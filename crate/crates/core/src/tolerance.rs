//! Numerical thresholds shared by the kernels.
//!
//! Every constant the kernels compare against lives in [`Tolerances::DEFAULT`];
//! nothing below `dense`/`subspace`/`regression` hard-codes its own cutoff.

/// Thresholds used by the deterministic kernels and solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative off-diagonal Gram cutoff for a Jacobi rotation, scaled by `sqrt(rows)`.
    pub jacobi_rel: f64,
    /// Maximum number of one-sided Jacobi sweeps.
    pub jacobi_max_sweeps: usize,
    /// Singular values at or below `max(m, n) * sigma_1 * rank_rel` are dropped.
    pub rank_rel: f64,
    /// QR reports rank deficiency when `min |r_jj| <= qr_rank_rel * ||M||_2`.
    pub qr_rank_rel: f64,
    /// Relative Rayleigh-quotient change that stops power iteration.
    pub power_rel: f64,
    /// Power-iteration cap.
    pub power_max_iter: usize,
    /// Perturbation of the all-ones start vector (alternating signs).
    pub power_start_perturbation: f64,
    /// Orthonormality tolerance accepted by `projection_distance`.
    pub orthonormal: f64,
    /// Approximate solves fail when `sigma_k / sigma_1` is at or below this.
    pub ill_conditioned_rel: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        jacobi_rel: f64::EPSILON,
        jacobi_max_sweeps: 30,
        rank_rel: 1e-14,
        qr_rank_rel: 1e-12,
        power_rel: 1e-12,
        power_max_iter: 10_000,
        power_start_perturbation: 1e-3,
        orthonormal: 1e-8,
        ill_conditioned_rel: 1e-13,
    };
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}
