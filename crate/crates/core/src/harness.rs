//! Benchmark sweep: noise every image at every level for several seeded
//! trials, run each method, record PSNR and wall time.
//!
//! Per-trial seeds are the first eight bytes (little endian) of
//! `SHA-256("fuzzdenoise-trial-seed-v1" || base_seed || len(name) || name ||
//! level bits || trial)`, integers encoded as little-endian `u64`. Adding an
//! image or level never perturbs the seeds of existing cells.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::denoise::{denoise_image, FilterConfig};
use crate::detect::{DetectorConfig, ThresholdMode};
use crate::error::{Error, Result};
use crate::image::GrayImage;
use crate::median::median_filter;
use crate::metrics::psnr;
use crate::noise::{inject_sap, NoiseSpec};
use crate::pgm::read_pgm;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Method {
    Proposed(FilterConfig),
    Median { radius: usize },
}

impl Method {
    /// Parses a method name, using `proposed` as the configuration for the
    /// fuzzy filter. `proposed-strict` and `proposed-relaxed` override its
    /// threshold mode; `median` is 3x3 and `median-r<k>` has radius `k`.
    pub fn parse_with(name: &str, proposed: FilterConfig) -> Result<Self> {
        let with_mode = |mode| -> Result<Self> {
            let d = proposed.detector();
            let det = DetectorConfig::new(d.scale(), d.epsilon(), mode)?;
            Ok(Method::Proposed(FilterConfig::new(
                det,
                proposed.h_max(),
                proposed.rho_min(),
            )?))
        };
        match name {
            "proposed" => Ok(Method::Proposed(proposed)),
            "proposed-strict" => with_mode(ThresholdMode::Strict),
            "proposed-relaxed" => with_mode(ThresholdMode::Relaxed),
            "median" => Ok(Method::Median { radius: 1 }),
            other => other
                .strip_prefix("median-r")
                .and_then(|r| r.parse().ok())
                .filter(|&r| r >= 1)
                .map(|radius| Method::Median { radius })
                .ok_or_else(|| Error::InvalidParameter(format!("unknown method `{other}`"))),
        }
    }

    pub fn apply(&self, img: &GrayImage) -> Result<GrayImage> {
        match self {
            Method::Proposed(cfg) => Ok(denoise_image(img, cfg)),
            Method::Median { radius } => median_filter(img, *radius),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Method::Proposed(cfg) if cfg.detector().mode() == ThresholdMode::Strict => {
                f.write_str("proposed-strict")
            }
            Method::Proposed(_) => f.write_str("proposed"),
            Method::Median { radius: 1 } => f.write_str("median"),
            Method::Median { radius } => write!(f, "median-r{radius}"),
        }
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Method::parse_with(s, FilterConfig::default())
    }
}

/// One (image, level, trial, method) measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub image: String,
    pub level: f64,
    pub trial: u32,
    pub method: String,
    pub psnr_db: f64,
    pub seconds: f64,
    pub seed: u64,
}

pub fn trial_seed(base_seed: u64, image: &str, level: f64, trial: u32) -> u64 {
    let mut hasher = Sha256::new();
    hasher.update(b"fuzzdenoise-trial-seed-v1");
    hasher.update(base_seed.to_le_bytes());
    hasher.update((image.len() as u64).to_le_bytes());
    hasher.update(image.as_bytes());
    hasher.update(level.to_bits().to_le_bytes());
    hasher.update(u64::from(trial).to_le_bytes());
    let digest = hasher.finalize();
    let mut first = [0u8; 8];
    first.copy_from_slice(&digest[..8]);
    u64::from_le_bytes(first)
}

#[derive(Clone, Debug)]
pub struct BenchPlan {
    pub levels: Vec<f64>,
    pub trials: u32,
    pub methods: Vec<Method>,
    pub base_seed: u64,
}

impl BenchPlan {
    fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter("method list is empty".into()));
        }
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be >= 1".into()));
        }
        if let Some(l) = self.levels.iter().find(|l| !(0.0..=1.0).contains(*l)) {
            return Err(Error::InvalidParameter(format!(
                "noise level {l} outside [0, 1]"
            )));
        }
        Ok(())
    }
}

fn canonical_order(a: &BenchRecord, b: &BenchRecord) -> std::cmp::Ordering {
    a.image
        .cmp(&b.image)
        .then(a.level.total_cmp(&b.level))
        .then(a.trial.cmp(&b.trial))
        .then(a.method.cmp(&b.method))
}

/// Runs the sweep over in-memory images. Records come back in canonical
/// (image, level, trial, method) order.
pub fn run_bench_images(
    images: &[(String, GrayImage)],
    plan: &BenchPlan,
) -> Result<Vec<BenchRecord>> {
    plan.validate()?;
    let mut records = Vec::new();
    for (name, clean) in images {
        for &level in &plan.levels {
            for trial in 0..plan.trials {
                let seed = trial_seed(plan.base_seed, name, level, trial);
                let noisy = inject_sap(clean, &NoiseSpec::new(level, seed)?);
                for method in &plan.methods {
                    let start = Instant::now();
                    let restored = method.apply(&noisy)?;
                    let seconds = start.elapsed().as_secs_f64();
                    records.push(BenchRecord {
                        image: name.clone(),
                        level,
                        trial,
                        method: method.to_string(),
                        psnr_db: psnr(clean, &restored)?.psnr_db.as_f64(),
                        seconds,
                        seed,
                    });
                }
            }
        }
    }
    records.sort_by(canonical_order);
    Ok(records)
}

/// Image name used in records: the file stem.
pub fn image_name(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

/// Loads each image and runs the sweep. Unreadable images are skipped with
/// a warning.
pub fn run_bench(paths: &[PathBuf], plan: &BenchPlan) -> Result<Vec<BenchRecord>> {
    plan.validate()?;
    let mut images = Vec::with_capacity(paths.len());
    for path in paths {
        match read_pgm(path) {
            Ok(img) => images.push((image_name(path), img)),
            Err(e) => log::warn!("skipping {}: {e}", path.display()),
        }
    }
    run_bench_images(&images, plan)
}

/// `*.pgm` files in `dir`, sorted by path.
pub fn pgm_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm")))
        .collect();
    paths.sort();
    Ok(paths)
}

pub fn write_csv<W: io::Write>(records: &[BenchRecord], writer: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for record in records {
        wtr.serialize(record)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_csv<R: io::Read>(reader: R) -> Result<Vec<BenchRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    rdr.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Trial-averaged values for one (image, level, method) cell.
#[derive(Clone, Debug, PartialEq)]
pub struct CellMean {
    pub image: String,
    pub level: f64,
    pub method: String,
    pub trials: usize,
    pub psnr_db: f64,
    pub seconds: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Ord, PartialOrd)]
struct LevelKey(u64);

impl LevelKey {
    fn new(level: f64) -> Self {
        LevelKey(level.to_bits())
    }

    fn get(self) -> f64 {
        f64::from_bits(self.0)
    }
}

pub fn cell_means(records: &[BenchRecord]) -> Vec<CellMean> {
    let mut cells: BTreeMap<(String, LevelKey, String), (usize, f64, f64)> = BTreeMap::new();
    for r in records {
        let cell = cells
            .entry((r.image.clone(), LevelKey::new(r.level), r.method.clone()))
            .or_default();
        cell.0 += 1;
        cell.1 += r.psnr_db;
        cell.2 += r.seconds;
    }
    let mut out: Vec<CellMean> = cells
        .into_iter()
        .map(|((image, level, method), (n, psnr, secs))| CellMean {
            image,
            level: level.get(),
            method,
            trials: n,
            psnr_db: psnr / n as f64,
            seconds: secs / n as f64,
        })
        .collect();
    out.sort_by(|a, b| {
        a.image
            .cmp(&b.image)
            .then(a.level.total_cmp(&b.level))
            .then(a.method.cmp(&b.method))
    });
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Metric {
    #[default]
    Psnr,
    Seconds,
}

impl Metric {
    pub fn higher_is_better(self) -> bool {
        matches!(self, Metric::Psnr)
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psnr" | "psnr_db" => Ok(Metric::Psnr),
            "seconds" | "time" => Ok(Metric::Seconds),
            other => Err(Error::InvalidParameter(format!("unknown metric `{other}`"))),
        }
    }
}

/// Datasets x methods matrix of trial-averaged scores, ready for ranking.
/// Dataset labels are `image@level`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreMatrix {
    pub methods: Vec<String>,
    pub datasets: Vec<String>,
    pub scores: Vec<Vec<f64>>,
}

pub fn score_matrix(records: &[BenchRecord], metric: Metric) -> Result<ScoreMatrix> {
    let means = cell_means(records);
    let methods: Vec<String> = means
        .iter()
        .map(|c| c.method.clone())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut rows: BTreeMap<(String, LevelKey), BTreeMap<String, f64>> = BTreeMap::new();
    for c in &means {
        let value = match metric {
            Metric::Psnr => c.psnr_db,
            Metric::Seconds => c.seconds,
        };
        rows.entry((c.image.clone(), LevelKey::new(c.level)))
            .or_default()
            .insert(c.method.clone(), value);
    }
    let mut datasets = Vec::with_capacity(rows.len());
    let mut scores = Vec::with_capacity(rows.len());
    for ((image, level), by_method) in rows {
        let label = format!("{image}@{}", level.get());
        let row = methods
            .iter()
            .map(|m| {
                by_method.get(m).copied().ok_or_else(|| {
                    Error::InvalidParameter(format!("missing result for {m} on {label}"))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        datasets.push(label);
        scores.push(row);
    }
    Ok(ScoreMatrix {
        methods,
        datasets,
        scores,
    })
}
