//! Randomized batches for the deterministic certificates in [`crate::theory`].
//!
//! Instance `i` of a suite depends only on `(seed, i)`, so a batch gives the
//! same verdicts under any schedule.

use rand::Rng;

use crate::dense::DenseMatrix;
use crate::error::Result;
use crate::par;
use crate::regression::{exact_truncated_solve, residual_norm, solve_with_factors};
use crate::sketch::{gaussian_matrix, gaussian_vector, RngSeed};
use crate::subspace::approx_truncated_svd;
use crate::theory::{appendix_bound, error_chain, lower_bound_instance};
use crate::Vector;

/// Largest dimension of a generated instance.
pub const MAX_DIM: usize = 60;
/// Largest number of power steps in the subspace-bound suite.
pub const MAX_P: usize = 10;
/// Slack on the two residual claims of the lower-bound suite, relative to `||b||`.
pub const LOWER_BOUND_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub trials: usize,
    pub passed: usize,
    /// One line per failing instance.
    pub failures: Vec<String>,
}

impl SuiteResult {
    pub fn all_passed(&self) -> bool {
        self.passed == self.trials
    }

    fn collect(name: &'static str, outcomes: Vec<std::result::Result<(), String>>) -> Self {
        let trials = outcomes.len();
        let failures: Vec<String> = outcomes.into_iter().filter_map(|o| o.err()).collect();
        Self {
            name,
            trials,
            passed: trials - failures.len(),
            failures,
        }
    }
}

/// Shape, rank and power steps of one generated instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct InstanceShape {
    pub m: usize,
    pub n: usize,
    pub k: usize,
    pub p: usize,
}

fn instance_seed(seed: u64, suite: u64, i: usize) -> RngSeed {
    RngSeed::new(seed).derive(suite).derive(i as u64)
}

/// Random dimensions with `2 <= n <= m <= MAX_DIM` and `1 <= k < n`.
pub fn instance_shape(seed: RngSeed, max_p: usize) -> InstanceShape {
    let mut rng = seed.rng();
    let n = rng.random_range(2..=MAX_DIM);
    let m = rng.random_range(n..=MAX_DIM);
    let k = rng.random_range(1..n.min(8));
    let p = rng.random_range(0..=max_p);
    InstanceShape { m, n, k, p }
}

/// Gaussian matrix whose columns are damped by `decay^j`; `decay = 1` keeps
/// the flat Gaussian spectrum.
pub fn instance_matrix(shape: InstanceShape, seed: RngSeed) -> DenseMatrix {
    let decay = [1.0, 0.9, 0.7, 0.5][(seed.derive(7).rng().random::<u32>() % 4) as usize];
    let g = gaussian_matrix(shape.m, shape.n, seed.derive(8));
    let scale: Vec<f64> = (0..shape.n).map(|j| f64::powi(decay, j as i32)).collect();
    g.scale_columns(&scale)
}

fn describe(i: usize, shape: InstanceShape) -> String {
    format!(
        "instance {i} ({}x{}, k={}, p={})",
        shape.m, shape.n, shape.k, shape.p
    )
}

/// Subspace inequality of [`appendix_bound`] on `trials` random `(A, S, p)` triples.
pub fn appendix_suite(trials: usize, seed: u64) -> SuiteResult {
    let outcomes = par::map_indexed(trials, |i| {
        let s = instance_seed(seed, 1, i);
        let shape = instance_shape(s, MAX_P);
        let a = instance_matrix(shape, s);
        let sketch = gaussian_matrix(shape.n, shape.k, s.derive(9));
        match appendix_bound(&a, &sketch, shape.k, shape.p) {
            Ok(r) if r.satisfied => Ok(()),
            Ok(r) => Err(format!(
                "{}: measured {:e} > bound {:e}",
                describe(i, shape),
                r.measured,
                r.bound
            )),
            Err(e) => Err(format!("{}: {e}", describe(i, shape))),
        }
    });
    SuiteResult::collect("appendix", outcomes)
}

/// The three error-chain inequalities on `trials` random `(A, b, p)`.
pub fn error_chain_suite(trials: usize, seed: u64) -> SuiteResult {
    let outcomes = par::map_indexed(trials, |i| {
        let s = instance_seed(seed, 2, i);
        let shape = instance_shape(s, 4);
        let a = instance_matrix(shape, s);
        let b = gaussian_vector(shape.m, s.derive(9));
        match error_chain(&a, &b, shape.k, shape.p, s.derive(10)) {
            Ok(reports) => match reports.iter().find(|r| !r.satisfied) {
                None => Ok(()),
                Some(r) => Err(format!(
                    "{}: {} measured {:e} > bound {:e}",
                    describe(i, shape),
                    r.label,
                    r.measured,
                    r.bound
                )),
            },
            Err(e) => Err(format!("{}: {e}", describe(i, shape))),
        }
    });
    SuiteResult::collect("error-chain", outcomes)
}

/// Checks both residual claims for the adversarial right-hand side.
pub fn check_lower_bound(
    a: &DenseMatrix,
    k: usize,
    p: usize,
    seed: RngSeed,
) -> Result<std::result::Result<(), String>> {
    let approx = approx_truncated_svd(a, k, p, seed)?;
    let inst = lower_bound_instance(a, &approx, k)?;
    let b_norm = inst.b.norm();
    let exact = exact_truncated_solve(a, &inst.b, k)?.residual_norm;
    let x_approx = Vector::new(solve_with_factors(&approx, &inst.b)?)?;
    let approx_res = residual_norm(a, &x_approx, &inst.b)?;
    if exact > LOWER_BOUND_TOL * b_norm {
        return Ok(Err(format!(
            "exact residual {exact:e} for ||b|| = {b_norm:e}"
        )));
    }
    if approx_res < (inst.epsilon_star - LOWER_BOUND_TOL) * b_norm {
        return Ok(Err(format!(
            "approximate residual {approx_res:e} below epsilon* ||b|| = {:e}",
            inst.epsilon_star * b_norm
        )));
    }
    Ok(Ok(()))
}

/// Adversarial right-hand side on `trials` random `(A, approximation)` pairs.
pub fn lower_bound_suite(trials: usize, seed: u64) -> SuiteResult {
    let outcomes = par::map_indexed(trials, |i| {
        let s = instance_seed(seed, 3, i);
        let shape = instance_shape(s, 3);
        let a = instance_matrix(shape, s);
        match check_lower_bound(&a, shape.k, shape.p, s.derive(9)) {
            Ok(verdict) => verdict.map_err(|e| format!("{}: {e}", describe(i, shape))),
            Err(e) => Err(format!("{}: {e}", describe(i, shape))),
        }
    });
    SuiteResult::collect("lower-bound", outcomes)
}

/// All three suites with `trials` instances each.
pub fn run_all(trials: usize, seed: u64) -> Vec<SuiteResult> {
    vec![
        appendix_suite(trials, seed),
        error_chain_suite(trials, seed),
        lower_bound_suite(trials, seed),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dense::thin_svd;

    #[test]
    fn shapes_stay_in_range() {
        for i in 0..200 {
            let s = instance_shape(RngSeed::new(3).derive(i), MAX_P);
            assert!(s.n >= 2 && s.n <= s.m && s.m <= MAX_DIM);
            assert!(s.k >= 1 && s.k < s.n && s.p <= MAX_P);
        }
    }

    #[test]
    fn generated_matrices_have_a_tail() {
        for i in 0..20 {
            let s = RngSeed::new(4).derive(i);
            let shape = instance_shape(s, 2);
            let f = thin_svd(&instance_matrix(shape, s)).unwrap();
            assert!(f.rank() > shape.k);
        }
    }

    #[test]
    fn small_batches_pass_and_repeat() {
        for suite in run_all(12, 5) {
            assert!(suite.all_passed(), "{suite:?}");
            assert_eq!(suite.trials, 12);
        }
        assert_eq!(appendix_suite(6, 9), appendix_suite(6, 9));
    }
}
