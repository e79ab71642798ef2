//! The seeded generator behind Monte Carlo sampling.
//!
//! The algorithm is SplitMix64 seeded with the raw 64-bit seed: the state
//! advances by `0x9E3779B97F4A7C15` and each output is the state passed
//! through the standard finalizer. Uniform reals take the top 53 bits.
//! This choice is part of the reproducibility contract of sampled runs.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

#[derive(Clone, Debug)]
pub struct Rng(SplitMix64);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(SplitMix64::seed_from_u64(seed))
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0.next_u64()
    }

    /// Uniform in `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform in `[0, n)`; `n` must be positive.
    pub fn below(&mut self, n: u64) -> u64 {
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }

    /// Per-sample seeds drawn in order from a generator seeded with `seed`.
    pub fn derive_seeds(seed: u64, count: usize) -> Vec<u64> {
        let mut base = Rng::new(seed);
        (0..count).map(|_| base.next_u64()).collect()
    }
}
