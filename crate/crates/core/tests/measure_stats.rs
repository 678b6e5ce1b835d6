mod support;

use std::f64::consts::TAU;

use nobie_core::drive::{generate_nobie_schedule, DriveConfig, DEFAULT_OMEGA_C};
use nobie_core::evolve::{evolve_final, hadamard_discriminate, schedule_trace};
use nobie_core::measure::{
    calibrate, omega_c_select, rabi_fit, run_experiment, sample_counts, DurationGrid, ShotConfig,
};
use nobie_core::QubitState;
use support::binomial_window_probability;

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

#[test]
fn sampling_is_unbiased() {
    let cfg = ShotConfig { repeats: 10_000, ..ShotConfig::default() }.with_seed(2024);
    let m = mean(&sample_counts(0.5, &cfg, "unbiased").unwrap());
    assert!((m - 0.5).abs() < 5.0 * 0.5 / (1024.0f64 * 1e4).sqrt(), "{m}");
}

#[test]
fn repeat_means_fall_in_the_binomial_window() {
    let p = 0.6749;
    let n = 1024 * 30;
    let w = 3.0 * (p * (1.0 - p) / n as f64).sqrt();
    let coverage = binomial_window_probability(n, p, w);
    assert!(coverage > 0.99, "{coverage}");
    let misses = (0..200u64)
        .filter(|&seed| {
            let m = mean(&sample_counts(p, &ShotConfig::default().with_seed(seed), "window").unwrap());
            (m - p).abs() > w
        })
        .count();
    // expected ≈ 200·(1 - coverage) ≈ 0.6
    assert!(misses <= 5, "{misses} of 200 outside the window");
}

#[test]
fn noiseless_rabi_fit_recovers_the_period() {
    let period = 58.66e-9;
    let t: Vec<f64> = (0..40).map(|k| k as f64 * 2.0 * period / 39.0).collect();
    let y: Vec<f64> = t.iter().map(|&t| 0.5 + 0.5 * (TAU * t / period).cos()).collect();
    let fit = rabi_fit(&t, &y).unwrap();
    assert!((fit.period / period - 1.0).abs() < 1e-3);
    assert!(fit.residual_rms < 1e-10);
}

#[test]
fn noisy_rabi_fit_recovers_the_period() {
    let period = 58.66e-9;
    let t: Vec<f64> = (0..40).map(|k| k as f64 * 2.0 * period / 39.0).collect();
    let shots = ShotConfig { repeats: 1, ..ShotConfig::default() };
    let mut errors: Vec<f64> = (0..100u64)
        .map(|seed| {
            let y: Vec<f64> = t
                .iter()
                .enumerate()
                .map(|(k, &t)| {
                    let p = 0.5 + 0.5 * (TAU * t / period).cos();
                    sample_counts(p, &shots.with_seed(seed), &format!("rabi/{k}")).unwrap()[0]
                })
                .collect();
            (rabi_fit(&t, &y).unwrap().period / period - 1.0).abs()
        })
        .collect();
    errors.sort_by(f64::total_cmp);
    assert!(errors[94] < 0.01, "95th percentile {}", errors[94]);
}

#[test]
fn calibration_recovers_the_drive_strength() {
    let cfg = DriveConfig::default();
    let d = [0.1, 0.2, 0.3, 0.4, 0.5];
    for seed in 0..3 {
        let report = calibrate(&cfg, &d, &DurationGrid::default(), &ShotConfig::default().with_seed(seed)).unwrap();
        assert!((report.selected_omega_c / DEFAULT_OMEGA_C - 1.0).abs() < 0.01, "{}", report.selected_omega_c);
    }
}

#[test]
fn line_selection_tracks_a_drifting_drive_strength() {
    // Ω_c falling linearly with d; the selected value is the mid-domain truth
    let truth = |d: f64| DEFAULT_OMEGA_C * (1.03 - 0.06 * d);
    let d = [0.1, 0.2, 0.3, 0.4, 0.5];
    let measured: Vec<f64> = d
        .iter()
        .map(|&d| {
            let cfg = DriveConfig::default().with_omega_c(truth(d)).unwrap();
            calibrate(&cfg, &[d], &DurationGrid::default(), &ShotConfig::default().with_seed(9))
                .unwrap()
                .selected_omega_c
        })
        .collect();
    let selected = omega_c_select(&d, &measured).unwrap();
    assert!((selected / truth(0.5) - 1.0).abs() < 0.01, "{selected}");
}

#[test]
fn discriminated_nobie_experiment_matches_theory() {
    let cfg = DriveConfig::default();
    let shots = ShotConfig::default().with_seed(17);
    for tau in [320, 480, 624] {
        let s = generate_nobie_schedule(&cfg, tau, 0.5).unwrap();
        let theory = hadamard_discriminate(&evolve_final(&schedule_trace(&s, &cfg).unwrap(), QubitState::ground()));
        let rec = run_experiment(&s, &cfg, &shots, true).unwrap();
        let se = (theory * (1.0 - theory) / (1024.0 * 30.0)).sqrt();
        assert!((rec.mean_p0 - theory).abs() <= 4.0 * se, "τ={tau}: {} vs {theory}", rec.mean_p0);
        assert_eq!(rec, run_experiment(&s, &cfg, &shots, true).unwrap());
    }
}
