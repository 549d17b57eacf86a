//! Randomized subspace power iteration and the rank-k factorization read off
//! from it.
//!
//! `Q` is an orthonormal basis for `(A A^T)^p A S` with `S` an `n x k`
//! Gaussian sketch. The products are applied right to left, and the block is
//! re-orthonormalized after every multiplication; this leaves the spanned
//! subspace unchanged while keeping the trailing directions representable
//! when `sigma_1 / sigma_k` is large.
//!
//! The approximation `Q Q^T A` is never formed: its SVD is
//! `(Q U_B) diag(sigma_B) V_B^T` where `B = Q^T A` is only `k x n`.

use crate::dense::{
    matmul, matmul_tn, qr_factor, thin_svd, DenseMatrix, FactorKind, TruncatedFactorization,
};
use crate::error::{Error, Result};
use crate::sketch::{gaussian_matrix, RngSeed};

fn check_rank_request(a: &DenseMatrix, k: usize) -> Result<()> {
    let limit = a.rows().min(a.cols());
    if k == 0 || k >= limit {
        return Err(Error::InvalidParameter(format!(
            "k = {k} must satisfy 1 <= k < min(m, n) = {limit}"
        )));
    }
    Ok(())
}

/// Orthonormal `m x k` basis for the range of `(A A^T)^p A S`, `S` Gaussian.
///
/// A rank-deficient sketch is retried once on the next stream of `seed`.
pub fn power_basis(a: &DenseMatrix, k: usize, p: usize, seed: RngSeed) -> Result<DenseMatrix> {
    check_rank_request(a, k)?;
    let attempt = |s: RngSeed| power_basis_with_sketch(a, &gaussian_matrix(a.cols(), k, s), p);
    match attempt(seed) {
        Err(Error::RankDeficient { .. }) => attempt(seed.next_stream()),
        other => other,
    }
}

/// Same as [`power_basis`] for a caller-supplied `n x k` sketch.
pub fn power_basis_with_sketch(a: &DenseMatrix, s: &DenseMatrix, p: usize) -> Result<DenseMatrix> {
    let mut q = qr_factor(&matmul(a, s)?)?.q;
    for _ in 0..p {
        let z = qr_factor(&matmul_tn(a, &q)?)?.q;
        q = qr_factor(&matmul(a, &z)?)?.q;
    }
    Ok(q)
}

/// Rank-k factorization of `Q Q^T A` for an orthonormal `Q`.
pub fn factor_projection(a: &DenseMatrix, q: &DenseMatrix) -> Result<TruncatedFactorization> {
    let k = q.cols();
    let b = matmul_tn(q, a)?;
    let svd = thin_svd(&b)?;
    if svd.rank() < k {
        return Err(Error::InvalidTruncation {
            k,
            rank: svd.rank(),
        });
    }
    Ok(TruncatedFactorization {
        u: matmul(q, &svd.u)?,
        sigma: svd.sigma,
        v: svd.v,
        kind: FactorKind::Approximate,
    })
}

/// Approximate rank-k truncated SVD from `p` power steps on a seeded sketch.
pub fn approx_truncated_svd(
    a: &DenseMatrix,
    k: usize,
    p: usize,
    seed: RngSeed,
) -> Result<TruncatedFactorization> {
    let q = power_basis(a, k, p, seed)?;
    factor_projection(a, &q)
}

/// [`approx_truncated_svd`] for an explicit sketch; no randomness involved.
pub fn approx_truncated_svd_with_sketch(
    a: &DenseMatrix,
    s: &DenseMatrix,
    p: usize,
) -> Result<TruncatedFactorization> {
    check_rank_request(a, s.cols())?;
    if s.rows() != a.cols() {
        return Err(Error::DimensionMismatch {
            op: "sketch",
            left: a.shape(),
            right: s.shape(),
        });
    }
    let q = power_basis_with_sketch(a, s, p)?;
    factor_projection(a, &q)
}
