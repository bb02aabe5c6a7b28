//! Fixtures shared by the criterion benches.

use fuzzdenoise_core::{inject_sap, synth, GrayImage, NoiseSpec};

/// Synthetic `size`x`size` image corrupted at `level` with a fixed seed.
pub fn noisy_shapes(size: usize, level: f64) -> GrayImage {
    let clean = synth::shapes(size, size);
    inject_sap(
        &clean,
        &NoiseSpec::new(level, 0x5eed).expect("level in [0, 1]"),
    )
}
