//! Command-line front end: `add-noise`, `denoise`, `median`, `psnr`, `bench`
//! and `ranktest`.
//!
//! Exit codes: 0 on success, 1 for usage or validation errors, 2 for I/O and
//! data errors.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use fuzzdenoise_core::harness::{self, BenchPlan, Method, Metric};
use fuzzdenoise_core::rank::{bonferroni_dunn_q, friedman_chi2, friedman_f};
use fuzzdenoise_core::{
    denoise_image_with_counts, inject_sap, median_filter, psnr, rank_rows, read_pgm,
    significance_report, write_pgm, DetectorConfig, Error, FilterConfig, NoiseSpec, ThresholdMode,
};

pub const THREADS_ENV: &str = "FUZZDENOISE_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "fuzzdenoise",
    version,
    about = "Salt-and-pepper denoising with an adaptive type-2 fuzzy filter"
)]
pub struct Cli {
    /// Worker threads (default: number of cores). FUZZDENOISE_THREADS overrides.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Corrupt an image with salt-and-pepper noise.
    AddNoise(AddNoiseArgs),
    /// Remove salt-and-pepper noise with the two-stage fuzzy filter.
    Denoise(DenoiseArgs),
    /// Standard median filter baseline.
    Median(MedianArgs),
    /// MSE and PSNR between a reference and a test image.
    Psnr(PsnrArgs),
    /// Noise/denoise sweep over a directory of images, written as CSV.
    Bench(BenchArgs),
    /// Friedman test and Bonferroni-Dunn critical difference over bench CSV.
    Ranktest(RanktestArgs),
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .parse()
        .map_err(|e| format!("`{s}` is not a number: {e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside the bound [0, 1]"))
    }
}

fn scale_factor(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .parse()
        .map_err(|e| format!("`{s}` is not a number: {e}"))?;
    if v > 1.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be greater than 1"))
    }
}

fn positive_real(s: &str) -> Result<f64, String> {
    let v: f64 = s
        .parse()
        .map_err(|e| format!("`{s}` is not a number: {e}"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{v} must be greater than 0"))
    }
}

fn positive_int(s: &str) -> Result<usize, String> {
    let v: usize = s
        .parse()
        .map_err(|e| format!("`{s}` is not a positive integer: {e}"))?;
    if v >= 1 {
        Ok(v)
    } else {
        Err("must be at least 1".into())
    }
}

fn threshold_mode(s: &str) -> Result<ThresholdMode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Args)]
struct AddNoiseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Fraction of pixels to corrupt.
    #[arg(long, value_parser = unit_interval)]
    level: f64,
    #[arg(long)]
    seed: u64,
    /// Probability that a corrupted pixel becomes white.
    #[arg(long, default_value_t = NoiseSpec::DEFAULT_SALT_RATIO, value_parser = unit_interval)]
    salt_ratio: f64,
    /// Write ASCII (P2) instead of binary (P5).
    #[arg(long)]
    ascii: bool,
}

#[derive(Debug, Args)]
struct FilterArgs {
    /// Threshold rule: strict (global max of the membership matrix) or relaxed.
    #[arg(long, default_value_t = ThresholdMode::Relaxed, value_parser = threshold_mode)]
    mode: ThresholdMode,
    /// Scaling factor of the l1 spread, > 1.
    #[arg(long, default_value_t = DetectorConfig::DEFAULT_SCALE, value_parser = scale_factor)]
    scale: f64,
    /// Spread below which a window counts as uniform.
    #[arg(long, default_value_t = DetectorConfig::DEFAULT_EPSILON, value_parser = positive_real)]
    epsilon: f64,
    /// Largest window half size tried before falling back.
    #[arg(long, default_value_t = FilterConfig::DEFAULT_H_MAX, value_parser = positive_int)]
    hmax: usize,
    /// Minimum number of good pixels needed to denoise.
    #[arg(long, default_value_t = FilterConfig::DEFAULT_RHO_MIN, value_parser = positive_int)]
    rho_min: usize,
}

impl FilterArgs {
    fn config(&self) -> Result<FilterConfig, Error> {
        FilterConfig::new(
            DetectorConfig::new(self.scale, self.epsilon, self.mode)?,
            self.hmax,
            self.rho_min,
        )
    }
}

#[derive(Debug, Args)]
struct DenoiseArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    filter: FilterArgs,
    #[arg(long)]
    ascii: bool,
    /// Print how many pixels took each branch of the filter.
    #[arg(long)]
    stats: bool,
}

#[derive(Debug, Args)]
struct MedianArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = positive_int)]
    radius: usize,
    #[arg(long)]
    ascii: bool,
}

#[derive(Debug, Args)]
struct PsnrArgs {
    #[arg(long = "ref")]
    reference: PathBuf,
    #[arg(long)]
    test: PathBuf,
}

#[derive(Debug, Args)]
struct BenchArgs {
    /// Directory of clean PGM images.
    #[arg(long)]
    images: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.5,0.8", value_parser = unit_interval)]
    levels: Vec<f64>,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    trials: u32,
    /// proposed, proposed-strict, median, median-r<k>.
    #[arg(long, value_delimiter = ',', default_value = "proposed,median")]
    methods: Vec<String>,
    #[arg(long, default_value_t = 7)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    filter: FilterArgs,
}

#[derive(Debug, Args)]
struct RanktestArgs {
    #[arg(long)]
    csv: PathBuf,
    /// Significance level; tabulated for 0.05 and 0.1.
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Explicit Bonferroni-Dunn critical value, overriding the table.
    #[arg(long)]
    q_alpha: Option<f64>,
    /// psnr (higher is better) or seconds (lower is better).
    #[arg(long, default_value = "psnr")]
    metric: String,
}

enum Failure {
    Usage(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(msg) => Failure::Usage(msg),
            other => Failure::Data(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

fn in_file(path: &std::path::Path, e: std::io::Error) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>, Failure> {
    match std::env::var(THREADS_ENV) {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(Failure::Usage(format!(
                "{THREADS_ENV}={v} is not a positive integer"
            ))),
        },
        Err(_) => match flag {
            Some(0) => Err(Failure::Usage("--threads must be at least 1".into())),
            other => Ok(other),
        },
    }
}

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code.
pub fn dispatch<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let rendered = e.render().to_string();
            let _ = if code == 0 {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let result = thread_count(cli.threads).and_then(|threads| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| Failure::Data(format!("thread pool: {e}")))?;
        // Output is buffered so the subcommand can run inside the pool.
        let mut buf = Vec::new();
        let result = pool.install(|| run(cli.command, &mut buf));
        out.write_all(&buf)?;
        result
    });
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}\n\nFor more information, try '--help'.");
            1
        }
        Err(Failure::Data(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            2
        }
    }
}

fn run(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::AddNoise(a) => {
            let img = read_pgm(&a.input)?;
            let spec = NoiseSpec::with_salt_ratio(a.level, a.seed, a.salt_ratio)?;
            let noisy = inject_sap(&img, &spec);
            write_pgm(&noisy, &a.out, a.ascii)?;
            writeln!(out, "corrupted={}", spec.corrupted_count(img.len()))?;
        }
        Command::Denoise(a) => {
            let cfg = a.filter.config()?;
            let img = read_pgm(&a.input)?;
            let (restored, counts) = denoise_image_with_counts(&img, &cfg);
            write_pgm(&restored, &a.out, a.ascii)?;
            if a.stats {
                writeln!(out, "untouched={}", counts.untouched)?;
                writeln!(out, "retained={}", counts.retained)?;
                writeln!(out, "uniform_window={}", counts.uniform_window)?;
                writeln!(out, "weighted={}", counts.weighted)?;
                writeln!(out, "uniform_goods={}", counts.uniform_goods)?;
                writeln!(out, "fallback={}", counts.fallback)?;
                writeln!(out, "max_half_size={}", counts.max_half_size)?;
            }
        }
        Command::Median(a) => {
            let img = read_pgm(&a.input)?;
            write_pgm(&median_filter(&img, a.radius)?, &a.out, a.ascii)?;
        }
        Command::Psnr(a) => {
            let reference = read_pgm(&a.reference)?;
            let test = read_pgm(&a.test)?;
            let res = psnr(&reference, &test)?;
            writeln!(out, "mse={:.4}", res.mse)?;
            writeln!(out, "psnr_db={}", res.psnr_db)?;
        }
        Command::Bench(a) => bench(a, out)?,
        Command::Ranktest(a) => ranktest(a, out)?,
    }
    Ok(())
}

fn bench(a: BenchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let proposed = a.filter.config()?;
    let methods = a
        .methods
        .iter()
        .map(|m| Method::parse_with(m.trim(), proposed))
        .collect::<Result<Vec<_>, _>>()?;
    let plan = BenchPlan {
        levels: a.levels,
        trials: a.trials,
        methods,
        base_seed: a.seed,
    };
    let paths = harness::pgm_files(&a.images)?;
    if paths.is_empty() {
        return Err(Failure::Data(format!(
            "no .pgm files in {}",
            a.images.display()
        )));
    }
    let records = harness::run_bench(&paths, &plan)?;
    let file = File::create(&a.out).map_err(|e| in_file(&a.out, e))?;
    harness::write_csv(&records, BufWriter::new(file))?;
    writeln!(
        out,
        "{:<16} {:>6} {:<16} {:>10} {:>10}",
        "image", "level", "method", "psnr_db", "seconds"
    )?;
    for cell in harness::cell_means(&records) {
        writeln!(
            out,
            "{:<16} {:>6.4} {:<16} {:>10.4} {:>10.4}",
            cell.image, cell.level, cell.method, cell.psnr_db, cell.seconds
        )?;
    }
    writeln!(out, "records={} csv={}", records.len(), a.out.display())?;
    Ok(())
}

fn ranktest(a: RanktestArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let metric: Metric = a.metric.parse()?;
    let records = harness::read_csv(BufReader::new(
        File::open(&a.csv).map_err(|e| in_file(&a.csv, e))?,
    ))?;
    let data_err = |e: Error| Failure::Data(e.to_string());
    let matrix = harness::score_matrix(&records, metric).map_err(data_err)?;
    let table = rank_rows(
        &matrix.methods,
        &matrix.datasets,
        &matrix.scores,
        metric.higher_is_better(),
    )
    .map_err(data_err)?;
    let (m, l) = (table.n_datasets(), table.n_methods());
    let q_alpha = match a.q_alpha {
        Some(q) if q > 0.0 => q,
        Some(q) => return Err(Failure::Usage(format!("--q-alpha {q} must be positive"))),
        None => bonferroni_dunn_q(a.alpha, l).ok_or_else(|| {
            Failure::Usage(format!(
                "no tabulated q_alpha for alpha={} and {l} methods; pass --q-alpha",
                a.alpha
            ))
        })?,
    };

    let width = table
        .datasets
        .iter()
        .map(String::len)
        .max()
        .unwrap_or(0)
        .max(8);
    write!(out, "{:<width$}", "dataset")?;
    for method in &table.methods {
        write!(out, " {method:>12}")?;
    }
    writeln!(out)?;
    for (label, ranks) in table.datasets.iter().zip(&table.ranks) {
        write!(out, "{label:<width$}")?;
        for r in ranks {
            write!(out, " {r:>12.4}")?;
        }
        writeln!(out)?;
    }
    write!(out, "{:<width$}", "avg_rank")?;
    for r in &table.avg_rank {
        write!(out, " {r:>12.4}")?;
    }
    writeln!(out)?;

    let chi2 = friedman_chi2(&table.avg_rank, m);
    writeln!(out, "datasets={m} methods={l}")?;
    writeln!(out, "chi2={chi2:.4}")?;
    match friedman_f(chi2, m, l) {
        Ok(f) => writeln!(out, "f_f={f:.4}")?,
        Err(_) => writeln!(out, "f_f=undefined")?,
    }
    writeln!(out, "dof={},{}", l - 1, (l - 1) * (m - 1))?;
    let report = significance_report(&table, q_alpha);
    writeln!(out, "q_alpha={:.4}", report.q_alpha)?;
    writeln!(out, "cd={:.4}", report.cd)?;
    writeln!(out, "best={}", report.best)?;
    for v in &report.verdicts {
        if v.method == report.best {
            continue;
        }
        let verdict = if v.different {
            "different"
        } else {
            "not-different"
        };
        writeln!(
            out,
            "{} avg_rank={:.4} diff={:.4} {verdict}",
            v.method, v.avg_rank, v.difference
        )?;
    }
    Ok(())
}
