//! Standard median filter, used as the comparison baseline.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::image::{reflect_index, GrayImage};

/// Replaces every pixel with the median of its `(2r+1)^2` reflected
/// neighborhood.
pub fn median_filter(img: &GrayImage, radius: usize) -> Result<GrayImage> {
    if radius == 0 {
        return Err(Error::InvalidParameter("median radius must be >= 1".into()));
    }
    let (width, height) = (img.width(), img.height());
    let r = radius as isize;
    let side = 2 * radius + 1;
    let mid = side * side / 2;
    let data: Vec<u8> = (0..height)
        .into_par_iter()
        .flat_map_iter(|row| {
            let mut buf = Vec::with_capacity(side * side);
            (0..width)
                .map(|col| {
                    buf.clear();
                    for dr in -r..=r {
                        let y = reflect_index(row as isize + dr, height);
                        for dc in -r..=r {
                            let x = reflect_index(col as isize + dc, width);
                            buf.push(img.get(y, x));
                        }
                    }
                    *buf.select_nth_unstable(mid).1
                })
                .collect::<Vec<_>>()
        })
        .collect();
    GrayImage::new(width, height, data)
}
