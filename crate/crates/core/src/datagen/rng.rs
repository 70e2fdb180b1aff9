//! Reproducible random streams.
//!
//! Each stream is a ChaCha8 keystream whose 256-bit key is derived from
//! `(master_seed, trial, machine, purpose)` by SplitMix64 finalizer mixing.
//! Normal variates use the Marsaglia polar method with the pure-Rust `libm`
//! logarithm and IEEE `sqrt`, so the sample path is bit-identical on every
//! platform.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn mix64(mut x: u64) -> u64 {
    x ^= x >> 30;
    x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x ^= x >> 27;
    x = x.wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// What a stream is used for; part of the key so uses never share draws.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Purpose {
    Design = 1,
    Noise = 2,
    Fusion = 3,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub master_seed: u64,
    pub trial: u64,
    pub machine: u64,
    pub purpose: Purpose,
}

impl StreamKey {
    pub fn new(master_seed: u64, trial: u64, machine: u64, purpose: Purpose) -> Self {
        Self {
            master_seed,
            trial,
            machine,
            purpose,
        }
    }

    /// 256-bit ChaCha key for this tuple.
    pub fn key(&self) -> [u8; 32] {
        let coords = [self.trial, self.machine, self.purpose as u64];
        let mut h = mix64(self.master_seed ^ GOLDEN);
        for (slot, &c) in coords.iter().enumerate() {
            h = mix64(h ^ mix64(c.wrapping_add(GOLDEN.wrapping_mul(slot as u64 + 1))));
        }
        let mut key = [0u8; 32];
        for (i, chunk) in key.chunks_exact_mut(8).enumerate() {
            let w = mix64(h.wrapping_add(GOLDEN.wrapping_mul(i as u64 + 1)));
            chunk.copy_from_slice(&w.to_le_bytes());
        }
        key
    }

    /// Compact 64-bit seed for this tuple.
    pub fn seed64(&self) -> u64 {
        u64::from_le_bytes(self.key()[..8].try_into().expect("8 bytes"))
    }

    pub fn stream(&self) -> NormalStream {
        NormalStream::from_key(self.key())
    }
}

/// Deterministic stream of uniforms and standard normals.
#[derive(Debug, Clone)]
pub struct NormalStream {
    rng: ChaCha8Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn from_key(key: [u8; 32]) -> Self {
        Self {
            rng: ChaCha8Rng::from_seed(key),
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 random bits.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let f = (-2.0 * libm::log(s) / s).sqrt();
                self.spare = Some(v * f);
                return u * f;
            }
        }
    }

    pub fn fill_normal(&mut self, out: &mut [f64]) {
        for v in out {
            *v = self.normal();
        }
    }
}
