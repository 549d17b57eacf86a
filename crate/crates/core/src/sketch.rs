//! Seeded Gaussian sketching matrices.
//!
//! Randomness comes from ChaCha8 keyed by a 64-bit seed, with the 64-bit
//! stream selector picking an independent keystream. Normal deviates use the
//! Box-Muller transform and consume both outputs of each pair in order.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dense::{DenseMatrix, Vector};

/// Seed plus stream selector for an independent random sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed {
    pub seed: u64,
    pub stream: u64,
}

impl RngSeed {
    pub const fn new(seed: u64) -> Self {
        Self { seed, stream: 0 }
    }

    pub const fn with_stream(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Same seed, next stream. Used for the retry after a rank failure.
    pub const fn next_stream(self) -> Self {
        Self {
            seed: self.seed,
            stream: self.stream.wrapping_add(1),
        }
    }

    /// A stream derived from this one by mixing in `tag`.
    pub fn derive(self, tag: u64) -> Self {
        Self {
            seed: self.seed,
            stream: splitmix64(self.stream ^ splitmix64(tag)),
        }
    }

    pub fn rng(self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    pub fn normals(self) -> NormalStream {
        NormalStream::new(self)
    }
}

/// SplitMix64 finalizer (Steele, Lea, Flood 2014 constants).
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Standard normal deviates from Box-Muller pairs.
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: RngSeed) -> Self {
        Self {
            rng: seed.rng(),
            spare: None,
        }
    }
}

impl Iterator for NormalStream {
    type Item = f64;

    fn next(&mut self) -> Option<f64> {
        if let Some(z) = self.spare.take() {
            return Some(z);
        }
        // u1 in (0, 1] keeps the log finite
        let u1 = 1.0 - self.rng.random::<f64>();
        let u2 = self.rng.random::<f64>();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        Some(r * theta.cos())
    }
}

/// `rows x cols` matrix of i.i.d. N(0, 1) entries, filled column by column.
pub fn gaussian_matrix(rows: usize, cols: usize, seed: RngSeed) -> DenseMatrix {
    let data: Vec<f64> = seed.normals().take(rows * cols).collect();
    DenseMatrix::new(rows, cols, data).expect("gaussian entries are finite")
}

pub fn gaussian_vector(dim: usize, seed: RngSeed) -> Vector {
    Vector::new(seed.normals().take(dim).collect()).expect("gaussian entries are finite")
}
