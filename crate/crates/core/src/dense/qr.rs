use super::matrix::{axpy, dot, norm2, DenseMatrix};
use super::norms::spectral_norm;
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Thin QR factors `M = Q R`.
#[derive(Debug, Clone, PartialEq)]
pub struct QrFactors {
    /// `m x k`, orthonormal columns.
    pub q: DenseMatrix,
    /// `k x k`, upper triangular with a nonnegative diagonal.
    pub r: DenseMatrix,
}

/// Householder QR of a tall matrix.
///
/// The diagonal of `R` is made nonnegative, so an orthonormal input comes back
/// unchanged. Rank deficiency is reported, never pivoted around.
pub fn qr_factor(m: &DenseMatrix) -> Result<QrFactors> {
    let (rows, cols) = m.shape();
    if rows < cols {
        return Err(Error::DimensionMismatch {
            op: "qr_factor (needs rows >= cols)",
            left: m.shape(),
            right: (cols, cols),
        });
    }

    let mut work = m.clone();
    // Householder vectors v_j live in rows j.. of column j; tau_j = 2 / (v^T v).
    let mut reflectors: Vec<(Vec<f64>, f64)> = Vec::with_capacity(cols);
    for j in 0..cols {
        let x = &work.col(j)[j..];
        let alpha = norm2(x);
        if alpha == 0.0 {
            reflectors.push((vec![0.0; rows - j], 0.0));
            continue;
        }
        let mut v = x.to_vec();
        let beta = if v[0] >= 0.0 { -alpha } else { alpha };
        v[0] -= beta;
        let vtv = dot(&v, &v);
        let tau = if vtv > 0.0 { 2.0 / vtv } else { 0.0 };
        for c in j..cols {
            let col = &mut work.col_mut(c)[j..];
            let s = tau * dot(&v, col);
            axpy(-s, &v, col);
        }
        // exact zeros below the diagonal
        let col = work.col_mut(j);
        col[j] = beta;
        col[j + 1..].iter_mut().for_each(|e| *e = 0.0);
        reflectors.push((v, tau));
    }

    let mut r = DenseMatrix::from_fn(cols, cols, |i, j| if i <= j { work[(i, j)] } else { 0.0 });

    // Q = H_0 H_1 ... H_{k-1} [I_k; 0], applied back to front.
    let mut q = DenseMatrix::zeros(rows, cols);
    for j in 0..cols {
        q[(j, j)] = 1.0;
    }
    for (j, (v, tau)) in reflectors.iter().enumerate().rev() {
        if *tau == 0.0 {
            continue;
        }
        for c in 0..cols {
            let col = &mut q.col_mut(c)[j..];
            let s = tau * dot(v, col);
            axpy(-s, v, col);
        }
    }

    for j in 0..cols {
        if r[(j, j)] < 0.0 {
            for c in j..cols {
                r[(j, c)] = -r[(j, c)];
            }
            q.col_mut(j).iter_mut().for_each(|e| *e = -*e);
        }
    }

    let norm = spectral_norm(&r);
    let threshold = Tolerances::DEFAULT.qr_rank_rel * norm;
    let min_diag = (0..cols)
        .map(|j| r[(j, j)].abs())
        .fold(f64::INFINITY, f64::min);
    if norm == 0.0 || min_diag <= threshold {
        return Err(Error::RankDeficient {
            min_diag,
            threshold,
        });
    }
    Ok(QrFactors { q, r })
}
