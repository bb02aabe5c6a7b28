mod common;

use fuzzdenoise_core::{
    denoise_image, median_filter, DetectorConfig, FilterConfig, ThresholdMode, Type2Profile, Window,
};

fn random_window(rng: &mut rand_chacha::ChaCha8Rng, n: usize) -> Vec<f64> {
    let img = common::random_noisy_image(rng, n, n, 0.4);
    img.as_raw().iter().map(|&v| f64::from(v) / 255.0).collect()
}

fn check_detector(pixels: &[f64], mode: ThresholdMode) {
    let cfg = DetectorConfig::new(2.0, 1e-4, mode).unwrap();
    let win = Window::from_pixels(pixels.to_vec()).unwrap();
    let oracle = common::detect(pixels, 2.0, mode == ThresholdMode::Strict);
    let ours = Type2Profile::analyze(&win, &cfg);
    let (Some(o), Ok(p)) = (oracle, ours) else {
        let uniform = pixels.iter().all(|&v| v == pixels[0]);
        assert!(
            uniform,
            "only uniform windows may be degenerate: {pixels:?}"
        );
        return;
    };
    let close = |a: f64, b: f64| (a - b).abs() <= 1e-12;
    assert!(close(o.m1, p.m1) && close(o.m2, p.m2) && close(o.sigma, p.sigma));
    for i in 0..pixels.len() {
        assert!(close(o.upper[i], p.upper[i]), "upper[{i}] {pixels:?}");
        assert!(close(o.lower[i], p.lower[i]), "lower[{i}] {pixels:?}");
        assert!(
            close(o.delta_mu[i], p.delta_mu[i]),
            "delta_mu[{i}] {pixels:?}"
        );
        assert_eq!(o.good[i], p.is_good(i), "label[{i}] {pixels:?}");
    }
    assert!(close(o.t_high, p.t_high) && close(o.t_low, p.t_low));
}

#[test]
fn detector_matches_oracle_on_3x3_windows() {
    let mut rng = common::rng(11);
    for _ in 0..1000 {
        let w = random_window(&mut rng, 3);
        check_detector(&w, ThresholdMode::Relaxed);
        check_detector(&w, ThresholdMode::Strict);
    }
}

#[test]
fn detector_matches_oracle_on_larger_windows() {
    let mut rng = common::rng(12);
    for n in [5, 7, 9] {
        for _ in 0..200 {
            let w = random_window(&mut rng, n);
            check_detector(&w, ThresholdMode::Relaxed);
            check_detector(&w, ThresholdMode::Strict);
        }
    }
}

#[test]
fn detector_handles_two_valued_windows() {
    let mut rng = common::rng(13);
    for _ in 0..300 {
        let w: Vec<f64> = (0..9)
            .map(|_| {
                if common::uniform(&mut rng) < 0.5 {
                    0.0
                } else {
                    1.0
                }
            })
            .collect();
        check_detector(&w, ThresholdMode::Relaxed);
        check_detector(&w, ThresholdMode::Strict);
    }
}

#[test]
fn filter_matches_oracle_bit_for_bit() {
    let mut rng = common::rng(21);
    for density in [0.2, 0.5, 0.8] {
        for trial in 0..5 {
            let img = common::random_noisy_image(&mut rng, 16, 16, density);
            for (mode, rho_min) in [
                (ThresholdMode::Relaxed, 1),
                (ThresholdMode::Strict, 1),
                (ThresholdMode::Relaxed, 3),
            ] {
                let det = DetectorConfig::new(2.0, 1e-4, mode).unwrap();
                let cfg = FilterConfig::new(det, 10, rho_min).unwrap();
                let expected =
                    common::filter(&img, 2.0, 1e-4, mode == ThresholdMode::Strict, 10, rho_min);
                assert_eq!(
                    denoise_image(&img, &cfg),
                    expected,
                    "density {density} trial {trial} mode {mode} rho_min {rho_min}"
                );
            }
        }
    }
}

#[test]
fn filter_matches_oracle_on_small_and_flat_images() {
    let mut rng = common::rng(22);
    for (w, h) in [(1, 1), (1, 5), (2, 2), (3, 7)] {
        let img = common::random_noisy_image(&mut rng, w, h, 0.7);
        let cfg = FilterConfig::default();
        assert_eq!(
            denoise_image(&img, &cfg),
            common::filter(&img, 2.0, 1e-4, false, 10, 1)
        );
    }
}

#[test]
fn median_matches_naive_sort() {
    let mut rng = common::rng(31);
    for _ in 0..50 {
        let img = common::random_image(&mut rng, 8, 8);
        for r in 1..=3 {
            assert_eq!(median_filter(&img, r).unwrap(), common::median(&img, r));
        }
    }
}
