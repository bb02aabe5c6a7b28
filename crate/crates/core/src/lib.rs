//! Salt-and-pepper denoising with a two-stage adaptive interval type-2 fuzzy
//! filter, plus the tooling to evaluate it: noise injection, a median
//! baseline, PSNR, benchmark sweeps and Friedman / Bonferroni-Dunn ranking.

pub mod denoise;
pub mod detect;
pub mod error;
pub mod harness;
pub mod image;
pub mod median;
pub mod metrics;
pub mod noise;
pub mod pgm;
pub mod rank;
pub mod synth;

pub use denoise::{
    denoise_image, denoise_image_with_counts, denoise_pixel, good_pixel_stats, weighted_denoise,
    DenoisePath, Denoiser, FilterConfig, GoodPixelSet, PathCounts, PixelOutcome,
};
pub use detect::{
    classify, compute_means, compute_sigma, membership_matrix, thresholds, DetectorConfig,
    MembershipMatrix, PixelLabel, ThresholdMode, Type2Profile,
};
pub use error::{Error, PgmError, Result};
pub use harness::{BenchPlan, BenchRecord, Method, Metric};
pub use image::{extract_window, GrayImage, NormPixel, Window};
pub use median::median_filter;
pub use metrics::{psnr, PsnrDb, PsnrResult};
pub use noise::{inject_sap, NoiseSpec};
pub use pgm::{read_pgm, write_pgm};
pub use rank::{
    bd_critical_difference, friedman, rank_rows, significance_report, FriedmanReport, RankTable,
    SignificanceReport,
};
