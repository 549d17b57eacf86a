//! Dense matrix types and the deterministic kernels: products, Householder
//! QR, one-sided Jacobi SVD, pseudo-inverse and the spectral norm.

mod matrix;
mod norms;
mod qr;
mod svd;

pub use matrix::{matmul, matmul_nt, matmul_tn, DenseMatrix, Vector};
pub use norms::spectral_norm;
pub use qr::{qr_factor, QrFactors};
pub use svd::{pseudo_inverse, thin_svd, truncate, FactorKind, ThinSvd, TruncatedFactorization};
