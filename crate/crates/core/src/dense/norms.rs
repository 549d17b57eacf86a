use super::matrix::{dot, matmul_nt, matmul_tn, norm2, DenseMatrix};
use crate::tolerance::Tolerances;

/// Spectral norm `sigma_1(M)` by power iteration on the smaller Gram matrix.
///
/// The start vector is the normalized all-ones vector with a small alternating
/// perturbation, so the result is a deterministic function of `M`.
pub fn spectral_norm(m: &DenseMatrix) -> f64 {
    if m.is_zero() {
        return 0.0;
    }
    // Scale to unit max entry so the Gram matrix cannot over- or underflow.
    let scale = m.max_abs();
    let unit = m.scaled(1.0 / scale);
    let gram = if unit.cols() <= unit.rows() {
        matmul_tn(&unit, &unit)
    } else {
        matmul_nt(&unit, &unit)
    }
    .expect("gram dimensions agree");
    scale * largest_eigenvalue_psd(&gram).sqrt()
}

/// Largest eigenvalue of a symmetric positive semidefinite matrix.
fn largest_eigenvalue_psd(g: &DenseMatrix) -> f64 {
    let tol = Tolerances::DEFAULT;
    let n = g.rows();
    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
            1.0 + sign * tol.power_start_perturbation
        })
        .collect();
    let nx = norm2(&x);
    x.iter_mut().for_each(|v| *v /= nx);

    let mut lambda = 0.0_f64;
    for _ in 0..tol.power_max_iter {
        let y = g.matvec(&x).expect("square gram");
        let next = dot(&x, &y).max(0.0);
        let ny = norm2(&y);
        if ny == 0.0 {
            return 0.0;
        }
        x = y.into_iter().map(|v| v / ny).collect();
        let converged = (next - lambda).abs() <= tol.power_rel * next;
        lambda = next;
        if converged {
            break;
        }
    }
    lambda
}
