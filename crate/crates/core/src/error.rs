use thiserror::Error;

/// Errors raised by the linear-algebra kernels, solvers and certificates.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {left:?} vs {right:?}")]
    DimensionMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("invalid shape {rows}x{cols} for {len} elements")]
    InvalidShape {
        rows: usize,
        cols: usize,
        len: usize,
    },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("matrix is rank deficient: |r_jj| = {min_diag:e} at or below threshold {threshold:e}")]
    RankDeficient { min_diag: f64, threshold: f64 },

    #[error("matrix is identically zero")]
    ZeroMatrix,

    #[error("truncation rank {k} is invalid for a matrix of numerical rank {rank}")]
    InvalidTruncation { k: usize, rank: usize },

    #[error("truncated factorization is ill conditioned: sigma_k / sigma_1 = {ratio:e}")]
    IllConditionedTruncation { ratio: f64 },

    #[error("no spectral gap at k (gamma_k = {gamma})")]
    NoSpectralGap { gamma: f64 },

    #[error("sketch is degenerate: sigma_k(V_k^T S) = 0")]
    DegenerateSketch,

    #[error("columns are not orthonormal (max deviation {deviation:e})")]
    NotOrthonormal { deviation: f64 },

    #[error("jacobi SVD did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
