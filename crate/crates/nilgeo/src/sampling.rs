//! Deterministic seeded sampling of rational and float test data.
//!
//! Check suites and the dynamics sampling loops all draw from a
//! ChaCha-seeded stream so that identical seeds reproduce identical runs,
//! independent of thread count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::Vector;
use crate::scalar::{Scalar, ScalarMode};

/// Seeded generator for reproducible sweeps.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// A fresh sampler for the `index`-th work item of a data-parallel
    /// sweep; results do not depend on scheduling order.
    pub fn for_item(seed: u64, index: u64) -> Self {
        Sampler { rng: ChaCha8Rng::seed_from_u64(seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15)) }
    }

    /// Small random rational p/q with p in [-4, 4], q in [1, 3]; keeps exact
    /// arithmetic cheap through long Baker-Campbell-Hausdorff chains.
    pub fn rational(&mut self) -> Scalar {
        let p = self.rng.random_range(-4i64..=4);
        let q = self.rng.random_range(1i64..=3);
        Scalar::ratio(p, q)
    }

    /// Random nonzero rational.
    pub fn rational_nonzero(&mut self) -> Scalar {
        loop {
            let s = self.rational();
            if !s.is_zero() {
                return s;
            }
        }
    }

    pub fn float_in(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn scalar(&mut self, mode: ScalarMode) -> Scalar {
        match mode {
            ScalarMode::Exact => self.rational(),
            ScalarMode::Float => Scalar::Float(self.float_in(-2.0, 2.0)),
        }
    }

    pub fn vector(&mut self, dim: usize, mode: ScalarMode) -> Vector {
        (0..dim).map(|_| self.scalar(mode)).collect()
    }

    pub fn nonzero_vector(&mut self, dim: usize, mode: ScalarMode) -> Vector {
        loop {
            let v = self.vector(dim, mode);
            if v.iter().any(|s| !s.is_zero()) {
                return v;
            }
        }
    }
}
