use std::path::PathBuf;

use thiserror::Error;

/// Errors raised while decoding a PGM stream. Offsets are byte positions in
/// the input.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum PgmError {
    #[error("bad magic number at byte {offset}: expected P2 or P5")]
    BadMagic { offset: usize },
    #[error("malformed header field `{field}` at byte {offset}")]
    BadHeader { field: &'static str, offset: usize },
    #[error("unsupported maxval {maxval} at byte {offset}: only 255 is accepted")]
    UnsupportedMaxval { maxval: u64, offset: usize },
    #[error("truncated payload at byte {offset}: expected {expected} samples, found {found}")]
    Truncated {
        offset: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid ASCII sample at byte {offset}")]
    BadSample { offset: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("pixel ({row}, {col}) outside {width}x{height} image")]
    OutOfBounds {
        row: usize,
        col: usize,
        width: usize,
        height: usize,
    },
    #[error("half size {half_size} exceeds the reflection limit {max} for this image")]
    WindowTooLarge { half_size: usize, max: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate window (sigma = {sigma}); route it through the uniform-region path")]
    DegenerateWindow { sigma: f64 },
    #[error("good-pixel set must not be empty")]
    EmptyGoodSet,
    #[error("dimension mismatch: {left_w}x{left_h} vs {right_w}x{right_h}")]
    DimensionMismatch {
        left_w: usize,
        left_h: usize,
        right_w: usize,
        right_h: usize,
    },
    #[error("non-finite score at row {row}, column {col}")]
    NonFiniteScore { row: usize, col: usize },
    #[error("Friedman F statistic undefined: chi2 = {chi2} equals M(l-1)")]
    FriedmanDegenerate { chi2: f64 },
    #[error("{path}: {source}")]
    Pgm {
        path: PathBuf,
        #[source]
        source: PgmError,
    },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Decode(#[from] PgmError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
