//! Portable Gaussian stream.
//!
//! The scheme is fixed so that other implementations can reproduce the
//! exact same draws:
//!
//! 1. Key a ChaCha20 generator with the 32-byte seed whose first eight bytes
//!    are `seed` in little-endian order (remaining bytes zero) and select
//!    stream number `stream`.
//! 2. A uniform variate is `((w >> 11) + 0.5) · 2⁻⁵³` for the next 64-bit
//!    output word `w`, which lies strictly inside `(0, 1)`.
//! 3. Normals come from the Box–Muller transform on consecutive uniforms
//!    `(u₁, u₂)`: `r = √(−2 ln u₁)`, the stream yields `r·cos(2πu₂)` and then
//!    `r·sin(2πu₂)` before drawing the next pair.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

const TWO_POW_NEG_53: f64 = 1.0 / (1u64 << 53) as f64;

#[derive(Debug, Clone)]
pub struct GaussianStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl GaussianStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha20Rng::from_seed(key);
        rng.set_stream(stream);
        GaussianStream { rng, spare: None }
    }

    pub fn next_uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) * TWO_POW_NEG_53
    }

    pub fn next_standard_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = self.next_uniform();
        let u2 = self.next_uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let theta = std::f64::consts::TAU * u2;
        self.spare = Some(r * theta.sin());
        r * theta.cos()
    }

    pub fn next_normal(&mut self, mean: f64, sd: f64) -> f64 {
        mean + sd * self.next_standard_normal()
    }
}
