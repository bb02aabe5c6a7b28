//! Mean squared error and PSNR on 8-bit intensities.

use std::fmt;

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// PSNR in decibels; identical images give [`PsnrDb::Infinite`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PsnrDb {
    Finite(f64),
    Infinite,
}

impl PsnrDb {
    /// Plain `f64`, with `+inf` for identical images.
    pub fn as_f64(self) -> f64 {
        match self {
            PsnrDb::Finite(v) => v,
            PsnrDb::Infinite => f64::INFINITY,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, PsnrDb::Infinite)
    }
}

impl fmt::Display for PsnrDb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PsnrDb::Finite(v) => write!(f, "{v:.4}"),
            PsnrDb::Infinite => f.write_str("inf"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsnrResult {
    pub mse: f64,
    pub psnr_db: PsnrDb,
}

/// Sum of squared intensity differences; exact in integer arithmetic.
pub fn squared_error(reference: &GrayImage, test: &GrayImage) -> Result<u64> {
    if !reference.same_dimensions(test) {
        return Err(Error::DimensionMismatch {
            left_w: reference.width(),
            left_h: reference.height(),
            right_w: test.width(),
            right_h: test.height(),
        });
    }
    Ok(reference
        .as_raw()
        .iter()
        .zip(test.as_raw())
        .map(|(&a, &b)| {
            let d = u64::from(a.abs_diff(b));
            d * d
        })
        .sum())
}

pub fn mse(reference: &GrayImage, test: &GrayImage) -> Result<f64> {
    Ok(squared_error(reference, test)? as f64 / reference.len() as f64)
}

pub fn psnr(reference: &GrayImage, test: &GrayImage) -> Result<PsnrResult> {
    let mse = mse(reference, test)?;
    let psnr_db = if mse == 0.0 {
        PsnrDb::Infinite
    } else {
        PsnrDb::Finite(10.0 * (255.0 * 255.0 / mse).log10())
    };
    Ok(PsnrResult { mse, psnr_db })
}
