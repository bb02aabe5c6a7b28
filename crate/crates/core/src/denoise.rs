//! Second stage: fuzzy-weighted replacement of detected impulses, and the
//! per-pixel driver that grows the window until good pixels are found.

use std::ops::AddAssign;
use std::sync::OnceLock;

use rayon::prelude::*;

use crate::detect::{compute_means, compute_sigma, gaussian, DetectorConfig, Type2Profile};
use crate::error::{Error, Result};
use crate::image::{extract_window, GrayImage, NormPixel, Window};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FilterConfig {
    detector: DetectorConfig,
    h_max: usize,
    rho_min: usize,
}

impl FilterConfig {
    pub const DEFAULT_H_MAX: usize = 10;
    pub const DEFAULT_RHO_MIN: usize = 1;

    pub fn new(detector: DetectorConfig, h_max: usize, rho_min: usize) -> Result<Self> {
        if h_max == 0 {
            return Err(Error::InvalidParameter("h_max must be >= 1".into()));
        }
        if rho_min == 0 {
            return Err(Error::InvalidParameter("rho_min must be >= 1".into()));
        }
        Ok(Self {
            detector,
            h_max,
            rho_min,
        })
    }

    pub fn detector(&self) -> &DetectorConfig {
        &self.detector
    }

    pub fn h_max(&self) -> usize {
        self.h_max
    }

    pub fn rho_min(&self) -> usize {
        self.rho_min
    }
}

impl Default for FilterConfig {
    fn default() -> Self {
        Self {
            detector: DetectorConfig::default(),
            h_max: Self::DEFAULT_H_MAX,
            rho_min: Self::DEFAULT_RHO_MIN,
        }
    }
}

/// Good pixels of a window with their Gaussian weights.
#[derive(Clone, Debug, PartialEq)]
pub struct GoodPixelSet {
    pub pixels: Vec<f64>,
    pub mean: f64,
    pub sigma_g: f64,
    /// `None` when `sigma_g <= epsilon`; the set is then replaced by its mean.
    pub weights: Option<Vec<f64>>,
}

impl GoodPixelSet {
    pub fn rho(&self) -> usize {
        self.pixels.len()
    }
}

pub fn good_pixel_stats(goods: &[f64], scale: f64, epsilon: f64) -> Result<GoodPixelSet> {
    if goods.is_empty() {
        return Err(Error::EmptyGoodSet);
    }
    let rho = goods.len() as f64;
    let mean = goods.iter().sum::<f64>() / rho;
    let sigma_g = goods.iter().map(|&g| scale * (g - mean).abs()).sum::<f64>() / rho;
    let weights =
        (sigma_g > epsilon).then(|| goods.iter().map(|&g| gaussian(g, mean, sigma_g)).collect());
    Ok(GoodPixelSet {
        pixels: goods.to_vec(),
        mean,
        sigma_g,
        weights,
    })
}

/// Weighted mean of the good pixels, or their plain mean on the uniform path.
pub fn weighted_denoise(gps: &GoodPixelSet) -> f64 {
    match &gps.weights {
        None => gps.mean,
        Some(weights) => {
            let (num, den) = gps
                .pixels
                .iter()
                .zip(weights)
                .fold((0.0, 0.0), |(n, d), (&g, &w)| (n + w * g, d + w));
            num / den
        }
    }
}

/// Which branch produced a pixel's value.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DenoisePath {
    /// Not an extreme intensity; left alone.
    Untouched,
    /// Extreme, but the detector judged the center good.
    Retained,
    /// Window spread at or below epsilon; replaced by the window mean.
    UniformWindow,
    /// Replaced by the fuzzy-weighted mean of good pixels.
    Weighted,
    /// Good pixels nearly identical; replaced by their mean.
    UniformGoods,
    /// Window growth exhausted without enough good pixels.
    Fallback,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PixelOutcome {
    /// Normalized value in `[0, 1]`.
    pub value: f64,
    pub path: DenoisePath,
    /// Half size of the last window examined; 0 when none was built.
    pub half_size: usize,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PathCounts {
    pub untouched: usize,
    pub retained: usize,
    pub uniform_window: usize,
    pub weighted: usize,
    pub uniform_goods: usize,
    pub fallback: usize,
    pub max_half_size: usize,
}

impl PathCounts {
    fn record(&mut self, outcome: &PixelOutcome) {
        let slot = match outcome.path {
            DenoisePath::Untouched => &mut self.untouched,
            DenoisePath::Retained => &mut self.retained,
            DenoisePath::UniformWindow => &mut self.uniform_window,
            DenoisePath::Weighted => &mut self.weighted,
            DenoisePath::UniformGoods => &mut self.uniform_goods,
            DenoisePath::Fallback => &mut self.fallback,
        };
        *slot += 1;
        self.max_half_size = self.max_half_size.max(outcome.half_size);
    }

    pub fn total(&self) -> usize {
        self.untouched
            + self.retained
            + self.uniform_window
            + self.weighted
            + self.uniform_goods
            + self.fallback
    }
}

impl AddAssign for PathCounts {
    fn add_assign(&mut self, rhs: Self) {
        self.untouched += rhs.untouched;
        self.retained += rhs.retained;
        self.uniform_window += rhs.uniform_window;
        self.weighted += rhs.weighted;
        self.uniform_goods += rhs.uniform_goods;
        self.fallback += rhs.fallback;
        self.max_half_size = self.max_half_size.max(rhs.max_half_size);
    }
}

/// Per-image filter state. Reads only from the noisy input, so pixels can be
/// processed in any order.
pub struct Denoiser<'a> {
    img: &'a GrayImage,
    cfg: FilterConfig,
    global_mean: OnceLock<f64>,
}

impl<'a> Denoiser<'a> {
    pub fn new(img: &'a GrayImage, cfg: FilterConfig) -> Self {
        Self {
            img,
            cfg,
            global_mean: OnceLock::new(),
        }
    }

    /// Mean of the image's non-extreme pixels, or of all pixels if every
    /// pixel is extreme.
    fn global_mean(&self) -> f64 {
        *self.global_mean.get_or_init(|| {
            mean_non_extreme(
                self.img
                    .as_raw()
                    .iter()
                    .map(|&v| NormPixel::from_intensity(v)),
            )
            .unwrap_or_else(|| {
                let sum: u64 = self.img.as_raw().iter().map(|&v| u64::from(v)).sum();
                sum as f64 / (255.0 * self.img.len() as f64)
            })
        })
    }

    pub fn pixel(&self, row: usize, col: usize) -> Result<PixelOutcome> {
        if row >= self.img.height() || col >= self.img.width() {
            return Err(Error::OutOfBounds {
                row,
                col,
                width: self.img.width(),
                height: self.img.height(),
            });
        }
        let center = self.img.normalized(row, col);
        if !center.is_extreme() {
            return Ok(PixelOutcome {
                value: center.value(),
                path: DenoisePath::Untouched,
                half_size: 0,
            });
        }

        let det = self.cfg.detector;
        let limit = self.cfg.h_max.min(self.img.max_half_size());
        let mut last: Option<Window> = None;
        for h in 1..=limit {
            let win = extract_window(self.img, row, col, h)?;
            let done = |value, path| {
                Ok(PixelOutcome {
                    value,
                    path,
                    half_size: h,
                })
            };
            let (m1, m2) = compute_means(&win);
            let (sigma, nu_avg) = compute_sigma(&win, m1, m2, det.scale());
            let profile = match Type2Profile::from_parts(&win, m1, m2, sigma, nu_avg, det.mode()) {
                Ok(profile) => profile,
                Err(Error::DegenerateWindow { .. }) => {
                    return done(win.mean(), DenoisePath::UniformWindow)
                }
                Err(e) => return Err(e),
            };
            let center_idx = win.center_index();
            if profile.is_good(center_idx) {
                return done(center.value(), DenoisePath::Retained);
            }
            if sigma <= det.epsilon() {
                return done(win.mean(), DenoisePath::UniformWindow);
            }
            let goods: Vec<f64> = win
                .pixels()
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != center_idx && profile.is_good(i))
                .map(|(_, &p)| p)
                .collect();
            if goods.len() < self.cfg.rho_min {
                last = Some(win);
                continue;
            }
            let gps = good_pixel_stats(&goods, det.scale(), det.epsilon())?;
            let path = if gps.weights.is_some() {
                DenoisePath::Weighted
            } else {
                DenoisePath::UniformGoods
            };
            return done(weighted_denoise(&gps), path);
        }

        let (value, half_size) = match &last {
            Some(win) => (
                mean_non_extreme(win.pixels().iter().map(|&p| NormPixel::from_value(p)))
                    .unwrap_or_else(|| self.global_mean()),
                win.half_size(),
            ),
            None => (self.global_mean(), 0),
        };
        Ok(PixelOutcome {
            value,
            path: DenoisePath::Fallback,
            half_size,
        })
    }

    pub fn run(&self) -> (GrayImage, PathCounts) {
        let width = self.img.width();
        let rows: Vec<(Vec<u8>, PathCounts)> = (0..self.img.height())
            .into_par_iter()
            .map(|row| {
                let mut counts = PathCounts::default();
                let mut out = Vec::with_capacity(width);
                for col in 0..width {
                    let outcome = self
                        .pixel(row, col)
                        .expect("coordinates in range and window within the reflection limit");
                    counts.record(&outcome);
                    out.push(match outcome.path {
                        DenoisePath::Untouched => self.img.get(row, col),
                        _ => NormPixel::quantize(outcome.value),
                    });
                }
                (out, counts)
            })
            .collect();
        let mut counts = PathCounts::default();
        let mut data = Vec::with_capacity(self.img.len());
        for (row, c) in rows {
            data.extend_from_slice(&row);
            counts += c;
        }
        let out = GrayImage::new(width, self.img.height(), data).expect("same dimensions");
        (out, counts)
    }
}

fn mean_non_extreme(pixels: impl Iterator<Item = NormPixel>) -> Option<f64> {
    let (sum, count) = pixels
        .filter(|p| !p.is_extreme())
        .fold((0.0, 0usize), |(s, c), p| (s + p.value(), c + 1));
    (count > 0).then(|| sum / count as f64)
}

/// Denoises one extreme pixel. Non-extreme pixels come back unchanged with
/// [`DenoisePath::Untouched`].
pub fn denoise_pixel(
    img: &GrayImage,
    row: usize,
    col: usize,
    cfg: &FilterConfig,
) -> Result<PixelOutcome> {
    Denoiser::new(img, *cfg).pixel(row, col)
}

pub fn denoise_image(img: &GrayImage, cfg: &FilterConfig) -> GrayImage {
    Denoiser::new(img, *cfg).run().0
}

/// Like [`denoise_image`], also reporting how many pixels took each branch.
pub fn denoise_image_with_counts(img: &GrayImage, cfg: &FilterConfig) -> (GrayImage, PathCounts) {
    Denoiser::new(img, *cfg).run()
}
