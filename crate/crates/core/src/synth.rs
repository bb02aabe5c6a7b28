//! Deterministic synthetic test images. Values stay inside `[16, 239]` so the
//! clean images contain no impulse-level pixels.

use crate::image::GrayImage;

fn to_u8(v: f64) -> u8 {
    v.round().clamp(16.0, 239.0) as u8
}

/// Diagonal ramp with two flat disks and a bright bar: smooth regions plus
/// sharp edges.
pub fn shapes(width: usize, height: usize) -> GrayImage {
    let (w, h) = (width as f64, height as f64);
    let disks = [
        (0.3 * h, 0.3 * w, 0.18 * w.min(h), 200.0),
        (0.65 * h, 0.7 * w, 0.22 * w.min(h), 55.0),
    ];
    GrayImage::from_fn(width, height, |r, c| {
        let (y, x) = (r as f64, c as f64);
        let mut v = 60.0 + 120.0 * (x / w + y / h) / 2.0;
        for &(cy, cx, rad, level) in &disks {
            if (y - cy).powi(2) + (x - cx).powi(2) <= rad * rad {
                v = level;
            }
        }
        if (0.82 * h..0.9 * h).contains(&y) && x > 0.1 * w {
            v = 225.0;
        }
        to_u8(v)
    })
    .expect("non-empty dimensions")
}

/// Sum of low-frequency sinusoids: a smooth, textured surface.
pub fn waves(width: usize, height: usize) -> GrayImage {
    let (w, h) = (width as f64, height as f64);
    GrayImage::from_fn(width, height, |r, c| {
        let (y, x) = (r as f64 / h, c as f64 / w);
        let tau = std::f64::consts::TAU;
        let v = 128.0
            + 50.0 * (tau * 2.0 * x).sin() * (tau * 1.5 * y).cos()
            + 30.0 * (tau * (3.0 * x + 2.0 * y)).sin()
            + 15.0 * (tau * 7.0 * y).cos();
        to_u8(v)
    })
    .expect("non-empty dimensions")
}
