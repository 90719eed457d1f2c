//! Seeded randomness.
//!
//! Every randomized routine takes an explicit `u64` seed and draws from a
//! SplitMix64 stream (increment `0x9E3779B97F4A7C15`, mixers
//! `0xBF58476D1CE4E5B9` and `0x94D049BB133111EB`). Independent sub-streams
//! (one per trial or sample) are derived from `(seed, index)`, so results do
//! not depend on evaluation order.

use num_complex::Complex64;
use rand::{RngExt, SeedableRng};
use rand_xoshiro::SplitMix64;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub struct SeededRng(SplitMix64);

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self(SplitMix64::seed_from_u64(seed))
    }

    /// Sub-stream `index` of `seed`.
    pub fn stream(seed: u64, index: u64) -> Self {
        Self::new(seed ^ index.wrapping_add(1).wrapping_mul(GOLDEN))
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.0.random::<f64>()
    }

    pub fn sign(&mut self) -> f64 {
        if self.0.random::<bool>() {
            1.0
        } else {
            -1.0
        }
    }

    /// Standard normal via Box–Muller.
    pub fn normal(&mut self) -> f64 {
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }

    /// Real and imaginary parts i.i.d. standard normal.
    pub fn complex_normal(&mut self) -> Complex64 {
        Complex64::new(self.normal(), self.normal())
    }

    /// Uniform on the closed disc of the given radius.
    pub fn in_disc(&mut self, radius: f64) -> Complex64 {
        let r = radius * self.uniform().sqrt();
        Complex64::from_polar(r, 2.0 * std::f64::consts::PI * self.uniform())
    }
}
