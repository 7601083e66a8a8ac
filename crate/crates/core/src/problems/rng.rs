//! The single random stream behind every generator.
//!
//! SplitMix64 (Steele, Lea and Flood) seeded directly with the caller's
//! 64-bit seed. Uniforms take the top 53 bits of each output; normals use
//! Box–Muller, consuming two uniforms per pair and returning the cosine
//! branch first. The algorithm is fixed, so instances are identical across
//! platforms.

use rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

#[derive(Debug, Clone)]
pub struct Stream {
    inner: SplitMix64,
    spare_normal: Option<f64>,
}

impl Stream {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: SplitMix64::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform on `[lo, hi)`.
    pub fn uniform_in(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }

    /// Uniform index in `0..len` by rejection, free of modulo bias.
    pub fn index(&mut self, len: usize) -> usize {
        assert!(len > 0, "empty range");
        let len = len as u64;
        let zone = u64::MAX - u64::MAX % len;
        loop {
            let r = self.next_u64();
            if r < zone {
                return (r % len) as usize;
            }
        }
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare_normal.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let radius = (-2.0 * u1.ln()).sqrt();
        let angle = std::f64::consts::TAU * u2;
        self.spare_normal = Some(radius * angle.sin());
        radius * angle.cos()
    }
}
