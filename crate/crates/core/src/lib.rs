//! SVD-truncated regularized least squares.
//!
//! `x_k = A_k^+ b` is computed two ways: exactly from the thin SVD of `A`, and
//! approximately from a rank-k factorization read off a randomized subspace
//! power iteration. The [`theory`] module turns the accompanying error bounds
//! into checkable certificates, and [`bench`] drives seeded experiments.

pub mod bench;
pub mod certify;
pub mod dense;
pub mod error;
pub mod par;
pub mod regression;
pub mod sketch;
pub mod subspace;
pub mod theory;
pub mod tolerance;

pub use dense::{DenseMatrix, FactorKind, ThinSvd, TruncatedFactorization, Vector};
pub use error::{Error, Result};
pub use sketch::RngSeed;
pub use tolerance::Tolerances;
