//! Straight-line reference implementations used by the oracle and
//! acceptance tests. Written without calling into the library's window,
//! detector or filter code.

#![allow(dead_code)]

use fuzzdenoise_core::GrayImage;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(rng: &mut ChaCha8Rng) -> f64 {
    (rng.next_u64() >> 11) as f64 / (1u64 << 53) as f64
}

pub fn random_image(rng: &mut ChaCha8Rng, width: usize, height: usize) -> GrayImage {
    let data = (0..width * height).map(|_| rng.next_u32() as u8).collect();
    GrayImage::new(width, height, data).unwrap()
}

/// Random image whose pixels are impulses with probability `density`.
pub fn random_noisy_image(
    rng: &mut ChaCha8Rng,
    width: usize,
    height: usize,
    density: f64,
) -> GrayImage {
    let data = (0..width * height)
        .map(|_| {
            if uniform(rng) < density {
                if rng.next_u32() & 1 == 0 {
                    0
                } else {
                    255
                }
            } else {
                1 + (rng.next_u32() % 254) as u8
            }
        })
        .collect();
    GrayImage::new(width, height, data).unwrap()
}

/// Mirror about the border without repeating the edge, one fold at a time.
pub fn mirror(mut i: isize, n: usize) -> usize {
    let n = n as isize;
    if n == 1 {
        return 0;
    }
    loop {
        if i < 0 {
            i = -i;
        } else if i >= n {
            i = 2 * (n - 1) - i;
        } else {
            return i as usize;
        }
    }
}

pub fn window(img: &GrayImage, row: usize, col: usize, h: usize) -> Vec<f64> {
    let mut out = Vec::new();
    let h = h as isize;
    for dr in -h..=h {
        for dc in -h..=h {
            let r = mirror(row as isize + dr, img.height());
            let c = mirror(col as isize + dc, img.width());
            out.push(f64::from(img.as_raw()[r * img.width() + c]) / 255.0);
        }
    }
    out
}

pub struct DetectorOracle {
    pub m1: f64,
    pub m2: f64,
    pub sigma: f64,
    pub upper: Vec<f64>,
    pub lower: Vec<f64>,
    pub delta_mu: Vec<f64>,
    pub t_high: f64,
    pub t_low: f64,
    pub good: Vec<bool>,
}

fn ascending(pixels: &[f64]) -> Vec<f64> {
    let mut v = pixels.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v
}

/// First stage for one window; `None` when the spread is zero.
pub fn detect(pixels: &[f64], s: f64, strict: bool) -> Option<DetectorOracle> {
    let n = pixels.len();
    let sorted = ascending(pixels);
    let half = (n - 1) / 2;
    let mut lo = 0.0;
    for &p in &sorted[..half] {
        lo += p;
    }
    let mut hi = 0.0;
    for &p in &sorted[half + 1..] {
        hi += p;
    }
    let m1 = 2.0 / (n - 1) as f64 * lo;
    let m2 = 2.0 / (n - 1) as f64 * hi;
    let nu = (m1 + m2) / 2.0;
    let mut acc = 0.0;
    for &p in pixels {
        acc += s * (p - nu).abs();
    }
    let sigma = acc / n as f64;
    if sigma <= 0.0 {
        return None;
    }
    let g = |p: f64, m: f64| (-0.5 * ((p - m) / sigma).powi(2)).exp();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    let mut delta_mu = Vec::new();
    for &p in pixels {
        let (a, b) = (g(p, m1), g(p, m2));
        let u = if p < m1 {
            a
        } else if p > m2 {
            b
        } else if a > b {
            a
        } else {
            b
        };
        let l = if p <= nu { b } else { a };
        upper.push(u);
        lower.push(l);
        delta_mu.push((u + l) / 2.0);
    }
    let mut t_low = f64::MIN;
    let mut t_high = f64::MIN;
    for i in 0..n {
        t_low = t_low.max(upper[i].min(lower[i]));
        if strict {
            t_high = t_high.max(upper[i]).max(lower[i]);
        } else {
            t_high = t_high.max(delta_mu[i]);
        }
    }
    let good = delta_mu.iter().map(|&d| d >= t_high).collect();
    Some(DetectorOracle {
        m1,
        m2,
        sigma,
        upper,
        lower,
        delta_mu,
        t_high,
        t_low,
        good,
    })
}

fn mean(v: &[f64]) -> f64 {
    let mut s = 0.0;
    for &x in v {
        s += x;
    }
    s / v.len() as f64
}

fn non_extreme(v: &[f64]) -> Vec<f64> {
    v.iter()
        .copied()
        .filter(|&p| p != 0.0 && p != 1.0)
        .collect()
}

/// Whole-image filter written as a single loop over pixels.
pub fn filter(
    img: &GrayImage,
    s: f64,
    eps: f64,
    strict: bool,
    h_max: usize,
    rho_min: usize,
) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let all: Vec<f64> = img.as_raw().iter().map(|&v| f64::from(v) / 255.0).collect();
    let global = {
        let ne = non_extreme(&all);
        if ne.is_empty() {
            let total: u64 = img.as_raw().iter().map(|&v| u64::from(v)).sum();
            total as f64 / (255.0 * all.len() as f64)
        } else {
            mean(&ne)
        }
    };
    let quant = |v: f64| (255.0 * v + 0.5).floor().clamp(0.0, 255.0) as u8;
    let mut out = img.as_raw().to_vec();
    for row in 0..h {
        for col in 0..w {
            let v = img.as_raw()[row * w + col];
            if v != 0 && v != 255 {
                continue;
            }
            let mut result = None;
            let mut last: Option<Vec<f64>> = None;
            let limit = h_max.min(w.min(h) - 1);
            for hh in 1..=limit {
                let win = window(img, row, col, hh);
                let c = (win.len() - 1) / 2;
                let Some(d) = detect(&win, s, strict) else {
                    result = Some(mean(&win));
                    break;
                };
                if d.good[c] {
                    result = Some(win[c]);
                    break;
                }
                if d.sigma <= eps {
                    result = Some(mean(&win));
                    break;
                }
                let goods: Vec<f64> = (0..win.len())
                    .filter(|&i| i != c && d.good[i])
                    .map(|i| win[i])
                    .collect();
                if goods.len() < rho_min {
                    last = Some(win);
                    continue;
                }
                let m = mean(&goods);
                let mut sg = 0.0;
                for &g in &goods {
                    sg += s * (g - m).abs();
                }
                sg /= goods.len() as f64;
                if sg <= eps {
                    result = Some(m);
                } else {
                    let (mut num, mut den) = (0.0, 0.0);
                    for &g in &goods {
                        let wt = (-0.5 * ((g - m) / sg).powi(2)).exp();
                        num += wt * g;
                        den += wt;
                    }
                    result = Some(num / den);
                }
                break;
            }
            let value = result.unwrap_or_else(|| match &last {
                Some(win) => {
                    let ne = non_extreme(win);
                    if ne.is_empty() {
                        global
                    } else {
                        mean(&ne)
                    }
                }
                None => global,
            });
            out[row * w + col] = quant(value);
        }
    }
    GrayImage::new(w, h, out).unwrap()
}

pub fn median(img: &GrayImage, r: usize) -> GrayImage {
    let (w, h) = (img.width(), img.height());
    let mut out = Vec::with_capacity(w * h);
    for row in 0..h {
        for col in 0..w {
            let mut v = Vec::new();
            for dr in -(r as isize)..=r as isize {
                for dc in -(r as isize)..=r as isize {
                    let y = mirror(row as isize + dr, h);
                    let x = mirror(col as isize + dc, w);
                    v.push(img.as_raw()[y * w + x]);
                }
            }
            v.sort_unstable();
            out.push(v[v.len() / 2]);
        }
    }
    GrayImage::new(w, h, out).unwrap()
}
