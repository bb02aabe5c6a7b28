//! Impulse detection with two primary Gaussians and an interval type-2
//! footprint.
//!
//! Each window gets exactly two primary membership functions, centred on the
//! lower-half and upper-half means of its sorted pixels and sharing one
//! spread. Their piecewise envelope gives the upper and lower membership
//! functions; a pixel is good when the average of its two memberships reaches
//! the window's adaptive threshold.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::Window;

/// How the upper threshold is taken from the membership matrix.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum ThresholdMode {
    /// Global maximum over both rows of the matrix.
    Strict,
    /// Maximum of the per-pixel averaged memberships. Always admits at least
    /// one good pixel.
    #[default]
    Relaxed,
}

impl fmt::Display for ThresholdMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ThresholdMode::Strict => "strict",
            ThresholdMode::Relaxed => "relaxed",
        })
    }
}

impl FromStr for ThresholdMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(ThresholdMode::Strict),
            "relaxed" => Ok(ThresholdMode::Relaxed),
            other => Err(Error::InvalidParameter(format!(
                "unknown threshold mode `{other}` (expected strict or relaxed)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DetectorConfig {
    scale: f64,
    epsilon: f64,
    mode: ThresholdMode,
}

impl DetectorConfig {
    pub const DEFAULT_SCALE: f64 = 2.0;
    pub const DEFAULT_EPSILON: f64 = 1e-4;

    pub fn new(scale: f64, epsilon: f64, mode: ThresholdMode) -> Result<Self> {
        if !(scale > 1.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "scaling factor must be > 1, got {scale}"
            )));
        }
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be > 0, got {epsilon}"
            )));
        }
        Ok(Self {
            scale,
            epsilon,
            mode,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mode(&self) -> ThresholdMode {
        self.mode
    }
}

impl Default for DetectorConfig {
    fn default() -> Self {
        Self {
            scale: Self::DEFAULT_SCALE,
            epsilon: Self::DEFAULT_EPSILON,
            mode: ThresholdMode::default(),
        }
    }
}

/// Gaussian membership `exp(-((p - mean) / sigma)^2 / 2)`.
#[inline]
pub fn gaussian(p: f64, mean: f64, sigma: f64) -> f64 {
    let z = (p - mean) / sigma;
    (-0.5 * z * z).exp()
}

/// Lower-half and upper-half means of the ascending pixels; the middle
/// sorted element is left out of both.
pub fn compute_means(win: &Window) -> (f64, f64) {
    let sorted = win.sorted();
    let n = sorted.len();
    let h = (n - 1) / 2;
    let norm = 2.0 / (n - 1) as f64;
    let m1 = norm * sorted[..h].iter().sum::<f64>();
    let m2 = norm * sorted[h + 1..].iter().sum::<f64>();
    (m1, m2)
}

/// Shared spread of the two primaries, `(1/N) * sum(s * |p - nu_avg|)` over
/// every pixel, and the midpoint `nu_avg` of the two means.
pub fn compute_sigma(win: &Window, m1: f64, m2: f64, scale: f64) -> (f64, f64) {
    let nu_avg = 0.5 * (m1 + m2);
    let total: f64 = win
        .pixels()
        .iter()
        .map(|&p| scale * (p - nu_avg).abs())
        .sum();
    (total / win.len() as f64, nu_avg)
}

/// The 2xN matrix of upper and lower memberships plus their column means.
#[derive(Clone, Debug, PartialEq)]
pub struct MembershipMatrix {
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub delta_mu: Vec<f64>,
}

/// Upper/lower membership of one pixel value.
#[inline]
pub fn envelope(p: f64, m1: f64, m2: f64, sigma: f64) -> (f64, f64) {
    let mu1 = gaussian(p, m1, sigma);
    let mu2 = gaussian(p, m2, sigma);
    let upper = if p < m1 {
        mu1
    } else if p <= m2 {
        mu1.max(mu2)
    } else {
        mu2
    };
    let lower = if p <= 0.5 * (m1 + m2) { mu2 } else { mu1 };
    (upper, lower)
}

pub fn membership_matrix(win: &Window, m1: f64, m2: f64, sigma: f64) -> Result<MembershipMatrix> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::DegenerateWindow { sigma });
    }
    let n = win.len();
    let mut upper = Vec::with_capacity(n);
    let mut lower = Vec::with_capacity(n);
    let mut delta_mu = Vec::with_capacity(n);
    for &p in win.pixels() {
        let (u, l) = envelope(p, m1, m2, sigma);
        if !(u.is_finite() && l.is_finite()) {
            return Err(Error::DegenerateWindow { sigma });
        }
        upper.push(u);
        lower.push(l);
        delta_mu.push(0.5 * (u + l));
    }
    Ok(MembershipMatrix {
        upper,
        lower,
        delta_mu,
    })
}

/// `(t_high, t_low)`. `t_low` is the max over pixels of the column minimum.
pub fn thresholds(matrix: &MembershipMatrix, mode: ThresholdMode) -> (f64, f64) {
    let t_low = matrix
        .upper
        .iter()
        .zip(&matrix.lower)
        .map(|(u, l)| u.min(*l))
        .fold(f64::NEG_INFINITY, f64::max);
    let t_high = match mode {
        ThresholdMode::Strict => matrix
            .upper
            .iter()
            .chain(&matrix.lower)
            .copied()
            .fold(f64::NEG_INFINITY, f64::max),
        ThresholdMode::Relaxed => matrix
            .delta_mu
            .iter()
            .copied()
            .fold(f64::NEG_INFINITY, f64::max),
    };
    (t_high, t_low)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PixelLabel {
    Good,
    Noisy,
}

pub fn classify(delta_mu: &[f64], t_high: f64) -> Vec<PixelLabel> {
    delta_mu
        .iter()
        .map(|&d| {
            if d >= t_high {
                PixelLabel::Good
            } else {
                PixelLabel::Noisy
            }
        })
        .collect()
}

/// Full first-stage state for one window.
#[derive(Clone, Debug, PartialEq)]
pub struct Type2Profile {
    pub m1: f64,
    pub m2: f64,
    pub sigma: f64,
    pub nu_avg: f64,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub delta_mu: Vec<f64>,
    pub t_high: f64,
    pub t_low: f64,
}

impl Type2Profile {
    /// Runs means, spread, memberships and thresholds. Fails with
    /// [`Error::DegenerateWindow`] when the spread is zero.
    pub fn analyze(win: &Window, cfg: &DetectorConfig) -> Result<Self> {
        let (m1, m2) = compute_means(win);
        let (sigma, nu_avg) = compute_sigma(win, m1, m2, cfg.scale());
        Self::from_parts(win, m1, m2, sigma, nu_avg, cfg.mode())
    }

    pub(crate) fn from_parts(
        win: &Window,
        m1: f64,
        m2: f64,
        sigma: f64,
        nu_avg: f64,
        mode: ThresholdMode,
    ) -> Result<Self> {
        let matrix = membership_matrix(win, m1, m2, sigma)?;
        let (t_high, t_low) = thresholds(&matrix, mode);
        let MembershipMatrix {
            upper,
            lower,
            delta_mu,
        } = matrix;
        Ok(Self {
            m1,
            m2,
            sigma,
            nu_avg,
            upper,
            lower,
            delta_mu,
            t_high,
            t_low,
        })
    }

    pub fn labels(&self) -> Vec<PixelLabel> {
        classify(&self.delta_mu, self.t_high)
    }

    pub fn is_good(&self, index: usize) -> bool {
        self.delta_mu[index] >= self.t_high
    }
}
