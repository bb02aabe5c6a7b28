use std::path::Path;
use std::process::{Command, Output};

use fuzzdenoise_core::{read_pgm, synth, write_pgm};
use tempfile::TempDir;

fn fuzzdenoise(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fuzzdenoise"))
        .args(args)
        .env_remove("FUZZDENOISE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn fixture(dir: &TempDir) -> std::path::PathBuf {
    let path = dir.path().join("clean.pgm");
    write_pgm(&synth::shapes(48, 40), &path, false).unwrap();
    path
}

#[test]
fn psnr_of_identical_images_is_infinite() {
    let dir = TempDir::new().unwrap();
    let clean = fixture(&dir);
    let o = fuzzdenoise(&["psnr", "--ref", p(&clean), "--test", p(&clean)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("psnr_db=inf"), "{}", stdout(&o));
    assert!(stdout(&o).contains("mse=0.0000"));
}

#[test]
fn missing_input_flag_is_usage_error() {
    let o = fuzzdenoise(&["denoise", "--out", "x.pgm"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--in"), "{}", stderr(&o));
}

#[test]
fn noise_level_outside_unit_interval_is_rejected() {
    let dir = TempDir::new().unwrap();
    let clean = fixture(&dir);
    let out = dir.path().join("noisy.pgm");
    let o = fuzzdenoise(&[
        "add-noise",
        "--in",
        p(&clean),
        "--out",
        p(&out),
        "--level",
        "1.5",
        "--seed",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("[0, 1]"), "{}", stderr(&o));
    assert!(!out.exists());
}

#[test]
fn unreadable_input_is_data_error() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("nope.pgm");
    let out = dir.path().join("out.pgm");
    let o = fuzzdenoise(&["denoise", "--in", p(&missing), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nope.pgm"), "{}", stderr(&o));

    let garbage = dir.path().join("garbage.pgm");
    std::fs::write(&garbage, b"P7\n1 1\n255\n\0").unwrap();
    let o = fuzzdenoise(&["median", "--in", p(&garbage), "--out", p(&out)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn noise_then_denoise_improves_psnr() {
    let dir = TempDir::new().unwrap();
    let clean = fixture(&dir);
    let noisy = dir.path().join("noisy.pgm");
    let restored = dir.path().join("restored.pgm");
    let o = fuzzdenoise(&[
        "add-noise",
        "--in",
        p(&clean),
        "--out",
        p(&noisy),
        "--level",
        "0.5",
        "--seed",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("corrupted=960"), "{}", stdout(&o));

    let o = fuzzdenoise(&[
        "denoise",
        "--in",
        p(&noisy),
        "--out",
        p(&restored),
        "--stats",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("fallback=0"));

    let psnr_of = |test: &Path| {
        let o = fuzzdenoise(&["psnr", "--ref", p(&clean), "--test", p(test)]);
        let text = stdout(&o);
        let line = text
            .lines()
            .find(|l| l.starts_with("psnr_db="))
            .unwrap()
            .to_string();
        line["psnr_db=".len()..].parse::<f64>().unwrap()
    };
    assert!(psnr_of(&restored) > psnr_of(&noisy) + 5.0);
    assert_eq!(read_pgm(&restored).unwrap().width(), 48);
}

#[test]
fn same_seed_gives_same_noise() {
    let dir = TempDir::new().unwrap();
    let clean = fixture(&dir);
    let a = dir.path().join("a.pgm");
    let b = dir.path().join("b.pgm");
    for out in [&a, &b] {
        let o = fuzzdenoise(&[
            "add-noise",
            "--in",
            p(&clean),
            "--out",
            p(out),
            "--level",
            "0.3",
            "--seed",
            "4",
        ]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn bench_then_ranktest() {
    let dir = TempDir::new().unwrap();
    let images = dir.path().join("images");
    std::fs::create_dir(&images).unwrap();
    write_pgm(&synth::shapes(32, 32), images.join("shapes.pgm"), false).unwrap();
    write_pgm(&synth::waves(32, 32), images.join("waves.pgm"), true).unwrap();
    let csv = dir.path().join("bench.csv");
    let o = fuzzdenoise(&[
        "bench",
        "--images",
        p(&images),
        "--levels",
        "0.2,0.5",
        "--trials",
        "2",
        "--methods",
        "proposed,median,median-r2",
        "--seed",
        "3",
        "--out",
        p(&csv),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("records=24"), "{}", stdout(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("image,level,trial,method,psnr_db,seconds,seed"));
    assert_eq!(text.lines().count(), 25);

    let o = fuzzdenoise(&["ranktest", "--csv", p(&csv), "--alpha", "0.1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("datasets=4 methods=3"), "{out}");
    assert!(out.contains("q_alpha=1.9600"), "{out}");
    assert!(out.contains("cd="));
    assert!(out.contains("best="));
}

#[test]
fn ranktest_rejects_untabulated_alpha_and_bad_csv() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("bad.csv");
    std::fs::write(
        &csv,
        "image,level,trial,method,psnr_db,seconds,seed\n\
         x,0.2,0,median,20.0,0.1,5\nx,0.2,0,proposed,25.0,0.1,5\n\
         x,0.5,0,median,12.0,0.1,6\nx,0.5,0,proposed,18.0,0.1,6\n",
    )
    .unwrap();
    let o = fuzzdenoise(&["ranktest", "--csv", p(&csv)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("f_f=undefined"), "{}", stdout(&o));
    let o = fuzzdenoise(&["ranktest", "--csv", p(&csv), "--alpha", "0.2"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));

    std::fs::write(
        &csv,
        "image,level,trial,method,psnr_db,seconds,seed\nx,0.2,0,proposed,1.0,0.1,5\n",
    )
    .unwrap();
    let o = fuzzdenoise(&["ranktest", "--csv", p(&csv)]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn thread_count_from_environment() {
    let dir = TempDir::new().unwrap();
    let clean = fixture(&dir);
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_fuzzdenoise"))
            .args(["psnr", "--ref", p(&clean), "--test", p(&clean)])
            .env("FUZZDENOISE_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(run("2").status.code(), Some(0));
    let bad = run("zero");
    assert_eq!(bad.status.code(), Some(1));
    assert!(stderr(&bad).contains("FUZZDENOISE_THREADS"));
}

#[test]
fn help_exits_zero() {
    let o = fuzzdenoise(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("ranktest"));
}
