//! Grayscale raster, normalized pixel view and neighborhood windows.

use crate::error::{Error, Result};

/// 8-bit grayscale image stored row-major.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "dimensions must be positive, got {width}x{height}"
            )));
        }
        let expected = width
            .checked_mul(height)
            .ok_or_else(|| Error::InvalidImage(format!("dimensions {width}x{height} overflow")))?;
        if data.len() != expected {
            return Err(Error::InvalidImage(format!(
                "{width}x{height} image needs {expected} samples, got {}",
                data.len()
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// Image with every pixel set to `value`.
    pub fn filled(width: usize, height: usize, value: u8) -> Result<Self> {
        Self::new(width, height, vec![value; width.saturating_mul(height)])
    }

    /// Builds an image by evaluating `f(row, col)` at every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut data = Vec::with_capacity(width.saturating_mul(height));
        for row in 0..height {
            for col in 0..width {
                data.push(f(row, col));
            }
        }
        Self::new(width, height, data)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_raw(&self) -> &[u8] {
        &self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    pub fn rows(&self) -> std::slice::Chunks<'_, u8> {
        self.data.chunks(self.width)
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: u8) {
        self.data[row * self.width + col] = value;
    }

    #[inline]
    pub fn normalized(&self, row: usize, col: usize) -> NormPixel {
        NormPixel::from_intensity(self.get(row, col))
    }

    pub fn same_dimensions(&self, other: &GrayImage) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// Largest half size whose reflected window stays inside the image.
    pub fn max_half_size(&self) -> usize {
        self.width.min(self.height) - 1
    }
}

/// Intensity scaled into `[0, 1]`; 0 and 255 map exactly onto 0.0 and 1.0.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct NormPixel(f64);

impl NormPixel {
    #[inline]
    pub fn from_intensity(value: u8) -> Self {
        NormPixel(f64::from(value) / 255.0)
    }

    /// Wraps an already-normalized value.
    #[inline]
    pub fn from_value(value: f64) -> Self {
        debug_assert!((0.0..=1.0).contains(&value));
        NormPixel(value)
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// True for the two salt-and-pepper levels.
    #[inline]
    pub fn is_extreme(self) -> bool {
        self.0 == 0.0 || self.0 == 1.0
    }

    /// Round-half-up back to an 8-bit intensity, clamped to `[0, 255]`.
    #[inline]
    pub fn quantize(value: f64) -> u8 {
        (255.0 * value + 0.5).floor().clamp(0.0, 255.0) as u8
    }
}

/// Maps a possibly out-of-range coordinate into `0..len` by mirroring about
/// the border without repeating the edge sample (`-1 -> 1`, `len -> len - 2`).
/// Folds repeatedly, so any offset resolves; `len == 1` always yields 0.
pub fn reflect_index(index: isize, len: usize) -> usize {
    if len == 1 {
        return 0;
    }
    let period = 2 * (len as isize - 1);
    let folded = index.rem_euclid(period);
    if folded < len as isize {
        folded as usize
    } else {
        (period - folded) as usize
    }
}

/// The `(2H+1)^2` neighborhood of a pixel, normalized, in raster order, with
/// an ascending copy.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    half_size: usize,
    center: (usize, usize),
    pixels: Vec<f64>,
    sorted: Vec<f64>,
}

impl Window {
    /// Builds a window directly from normalized values in raster order.
    /// The length must be an odd square.
    pub fn from_pixels(pixels: Vec<f64>) -> Result<Self> {
        let side = (pixels.len() as f64).sqrt().round() as usize;
        if side * side != pixels.len() || side.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "window of {} pixels is not an odd square",
                pixels.len()
            )));
        }
        if let Some(p) = pixels.iter().find(|p| !(0.0..=1.0).contains(*p)) {
            return Err(Error::InvalidParameter(format!(
                "normalized pixel {p} outside [0, 1]"
            )));
        }
        let half_size = side / 2;
        Ok(Self::assemble(half_size, (half_size, half_size), pixels))
    }

    fn assemble(half_size: usize, center: (usize, usize), pixels: Vec<f64>) -> Self {
        let mut sorted = pixels.clone();
        sorted.sort_by(f64::total_cmp);
        Self {
            half_size,
            center,
            pixels,
            sorted,
        }
    }

    pub fn half_size(&self) -> usize {
        self.half_size
    }

    pub fn center(&self) -> (usize, usize) {
        self.center
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    pub fn center_index(&self) -> usize {
        (self.pixels.len() - 1) / 2
    }

    pub fn center_value(&self) -> f64 {
        self.pixels[self.center_index()]
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.pixels.len() as f64
    }
}

/// Extracts the reflected neighborhood of half size `half_size` around
/// `(row, col)`.
pub fn extract_window(img: &GrayImage, row: usize, col: usize, half_size: usize) -> Result<Window> {
    if row >= img.height() || col >= img.width() {
        return Err(Error::OutOfBounds {
            row,
            col,
            width: img.width(),
            height: img.height(),
        });
    }
    if half_size == 0 {
        return Err(Error::InvalidParameter(
            "window half size must be >= 1".into(),
        ));
    }
    let max = img.max_half_size();
    if half_size > max {
        return Err(Error::WindowTooLarge { half_size, max });
    }
    let h = half_size as isize;
    let side = 2 * half_size + 1;
    let mut pixels = Vec::with_capacity(side * side);
    for dr in -h..=h {
        let r = reflect_index(row as isize + dr, img.height());
        for dc in -h..=h {
            let c = reflect_index(col as isize + dc, img.width());
            pixels.push(img.normalized(r, c).value());
        }
    }
    Ok(Window::assemble(half_size, (row, col), pixels))
}
