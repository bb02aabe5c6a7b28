//! Seeded salt-and-pepper noise injection.
//!
//! The generator is ChaCha20 (`rand_chacha::ChaCha20Rng`) seeded through
//! `seed_from_u64`. Corrupted positions are the prefix of a partial
//! Fisher-Yates shuffle of the pixel indices; bounded draws use rejection
//! sampling on 64-bit outputs, so the stream depends only on the seed.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Noise density, seed and salt fraction for one injection.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseSpec {
    level: f64,
    seed: u64,
    salt_ratio: f64,
}

impl NoiseSpec {
    pub const DEFAULT_SALT_RATIO: f64 = 0.5;

    pub fn new(level: f64, seed: u64) -> Result<Self> {
        Self::with_salt_ratio(level, seed, Self::DEFAULT_SALT_RATIO)
    }

    pub fn with_salt_ratio(level: f64, seed: u64, salt_ratio: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&level) {
            return Err(Error::InvalidParameter(format!(
                "noise level {level} outside [0, 1]"
            )));
        }
        if !(0.0..=1.0).contains(&salt_ratio) {
            return Err(Error::InvalidParameter(format!(
                "salt ratio {salt_ratio} outside [0, 1]"
            )));
        }
        Ok(Self {
            level,
            seed,
            salt_ratio,
        })
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn salt_ratio(&self) -> f64 {
        self.salt_ratio
    }

    /// Number of pixels overwritten in an image of `pixels` samples.
    pub fn corrupted_count(&self, pixels: usize) -> usize {
        ((self.level * pixels as f64).round() as usize).min(pixels)
    }
}

/// Uniform integer in `0..bound` by rejection, `bound > 0`.
fn below(rng: &mut ChaCha20Rng, bound: u64) -> u64 {
    let zone = u64::MAX - (u64::MAX - bound + 1) % bound;
    loop {
        let v = rng.next_u64();
        if v <= zone {
            return v % bound;
        }
    }
}

/// Uniform real in `[0, 1)` from the top 53 bits of a draw.
fn unit(rng: &mut ChaCha20Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Overwrites exactly `round(level * W * H)` distinct pixels with 255
/// (probability `salt_ratio`) or 0.
pub fn inject_sap(img: &GrayImage, spec: &NoiseSpec) -> GrayImage {
    let n = img.len();
    let count = spec.corrupted_count(n);
    let mut rng = ChaCha20Rng::seed_from_u64(spec.seed);
    let mut order: Vec<usize> = (0..n).collect();
    let mut data = img.as_raw().to_vec();
    for i in 0..count {
        let j = i + below(&mut rng, (n - i) as u64) as usize;
        order.swap(i, j);
        let salt = unit(&mut rng) < spec.salt_ratio;
        data[order[i]] = if salt { 255 } else { 0 };
    }
    GrayImage::new(img.width(), img.height(), data).expect("dimensions unchanged")
}
