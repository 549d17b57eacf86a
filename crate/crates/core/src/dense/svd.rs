use super::matrix::{dot, matmul_nt, norm2, DenseMatrix};
use crate::error::{Error, Result};
use crate::tolerance::Tolerances;

/// Compact SVD `M = U diag(sigma) V^T` restricted to the numerical rank.
#[derive(Debug, Clone, PartialEq)]
pub struct ThinSvd {
    /// `m x rank`, orthonormal columns.
    pub u: DenseMatrix,
    /// Descending, strictly positive.
    pub sigma: Vec<f64>,
    /// `n x rank`, orthonormal columns.
    pub v: DenseMatrix,
}

impl ThinSvd {
    #[inline]
    pub fn rank(&self) -> usize {
        self.sigma.len()
    }

    pub fn reconstruct(&self) -> DenseMatrix {
        matmul_nt(&self.u.scale_columns(&self.sigma), &self.v).expect("factor shapes agree")
    }
}

/// Whether a rank-k factorization came from the full SVD or from sketching.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorKind {
    Exact,
    Approximate,
}

/// Rank-k factorization `U_k diag(sigma_k) V_k^T`.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncatedFactorization {
    pub u: DenseMatrix,
    pub sigma: Vec<f64>,
    pub v: DenseMatrix,
    pub kind: FactorKind,
}

impl TruncatedFactorization {
    #[inline]
    pub fn k(&self) -> usize {
        self.sigma.len()
    }

    /// The rank-k matrix itself.
    pub fn reconstruct(&self) -> DenseMatrix {
        matmul_nt(&self.u.scale_columns(&self.sigma), &self.v).expect("factor shapes agree")
    }

    /// `V diag(1/sigma) U^T`.
    pub fn pseudo_inverse(&self) -> DenseMatrix {
        let inv: Vec<f64> = self.sigma.iter().map(|s| 1.0 / s).collect();
        matmul_nt(&self.v.scale_columns(&inv), &self.u).expect("factor shapes agree")
    }

    /// `V diag(1/sigma) U^T b`, applied factor by factor.
    pub fn apply_pseudo_inverse(&self, b: &[f64]) -> Result<Vec<f64>> {
        let coeffs: Vec<f64> = self
            .u
            .transpose_matvec(b)?
            .into_iter()
            .zip(&self.sigma)
            .map(|(c, s)| c / s)
            .collect();
        self.v.matvec(&coeffs)
    }
}

/// Thin SVD by one-sided (Hestenes) Jacobi on the taller orientation.
///
/// Singular values at or below `max(m, n) * sigma_1 * 1e-14` are discarded.
/// Each right singular vector is sign-flipped so that its largest-magnitude
/// entry (lowest index on ties) is positive.
pub fn thin_svd(m: &DenseMatrix) -> Result<ThinSvd> {
    if m.is_zero() {
        return Err(Error::ZeroMatrix);
    }
    let transposed = m.rows() < m.cols();
    let work = if transposed { m.transpose() } else { m.clone() };
    let (w, rot) = jacobi(work)?;
    let (rows, cols) = w.shape();

    let norms: Vec<f64> = (0..cols).map(|j| norm2(w.col(j))).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&a, &b| norms[b].total_cmp(&norms[a]).then(a.cmp(&b)));

    let sigma_1 = norms[order[0]];
    let cutoff = rows.max(cols) as f64 * sigma_1 * Tolerances::DEFAULT.rank_rel;
    let kept: Vec<usize> = order
        .into_iter()
        .take_while(|&j| norms[j] > cutoff)
        .collect();
    let rank = kept.len();

    let sigma: Vec<f64> = kept.iter().map(|&j| norms[j]).collect();
    let mut left = DenseMatrix::zeros(rows, rank);
    let mut right = DenseMatrix::zeros(cols, rank);
    for (c, &j) in kept.iter().enumerate() {
        let s = norms[j];
        left.col_mut(c)
            .iter_mut()
            .zip(w.col(j))
            .for_each(|(d, x)| *d = x / s);
        right.col_mut(c).copy_from_slice(rot.col(j));
    }

    let (mut u, mut v) = if transposed {
        (right, left)
    } else {
        (left, right)
    };
    canonicalize_signs(&mut u, &mut v);
    Ok(ThinSvd { u, sigma, v })
}

fn canonicalize_signs(u: &mut DenseMatrix, v: &mut DenseMatrix) {
    for c in 0..v.cols() {
        let col = v.col(c);
        let mut best = 0;
        for (i, x) in col.iter().enumerate() {
            if x.abs() > col[best].abs() {
                best = i;
            }
        }
        if col[best] < 0.0 {
            v.col_mut(c).iter_mut().for_each(|x| *x = -*x);
            u.col_mut(c).iter_mut().for_each(|x| *x = -*x);
        }
    }
}

/// Orthogonalizes the columns of `w` by plane rotations; returns the rotated
/// columns and the accumulated rotation `V` with `w_in V = w_out`.
fn jacobi(mut w: DenseMatrix) -> Result<(DenseMatrix, DenseMatrix)> {
    let tol = Tolerances::DEFAULT;
    let (rows, cols) = w.shape();
    let mut v = DenseMatrix::identity(cols);
    let threshold = tol.jacobi_rel * (rows as f64).sqrt();
    let mut sq = vec![0.0; cols];

    for _ in 0..tol.jacobi_max_sweeps {
        for (j, s) in sq.iter_mut().enumerate() {
            *s = dot(w.col(j), w.col(j));
        }
        let mut rotated = false;
        for i in 0..cols.saturating_sub(1) {
            for j in i + 1..cols {
                let (a, b) = (sq[i], sq[j]);
                if a == 0.0 || b == 0.0 {
                    continue;
                }
                let g = dot(w.col(i), w.col(j));
                if g.abs() <= threshold * (a.sqrt() * b.sqrt()) {
                    continue;
                }
                rotated = true;
                let zeta = (b - a) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut w, i, j, c, s);
                rotate(&mut v, i, j, c, s);
                sq[i] = a - t * g;
                sq[j] = b + t * g;
            }
        }
        if !rotated {
            return Ok((w, v));
        }
    }
    Err(Error::NoConvergence {
        sweeps: tol.jacobi_max_sweeps,
    })
}

/// `(x_i, x_j) <- (c x_i - s x_j, s x_i + c x_j)` on columns `i < j`.
#[inline]
fn rotate(m: &mut DenseMatrix, i: usize, j: usize, c: f64, s: f64) {
    let rows = m.rows();
    let (head, tail) = m.data_mut().split_at_mut(j * rows);
    let xi = &mut head[i * rows..(i + 1) * rows];
    let xj = &mut tail[..rows];
    for (p, q) in xi.iter_mut().zip(xj.iter_mut()) {
        let (a, b) = (*p, *q);
        *p = c * a - s * b;
        *q = s * a + c * b;
    }
}

/// `A^+ = V diag(1/sigma) U^T` from a thin SVD.
pub fn pseudo_inverse(f: &ThinSvd) -> DenseMatrix {
    let inv: Vec<f64> = f.sigma.iter().map(|s| 1.0 / s).collect();
    matmul_nt(&f.v.scale_columns(&inv), &f.u).expect("factor shapes agree")
}

/// Leading `k` singular triples as an exact rank-k factorization.
///
/// `k` equal to the numerical rank is accepted and returns the whole SVD.
pub fn truncate(f: &ThinSvd, k: usize) -> Result<TruncatedFactorization> {
    if k == 0 || k > f.rank() {
        return Err(Error::InvalidTruncation { k, rank: f.rank() });
    }
    Ok(TruncatedFactorization {
        u: f.u.leading_columns(k),
        sigma: f.sigma[..k].to_vec(),
        v: f.v.leading_columns(k),
        kind: FactorKind::Exact,
    })
}
