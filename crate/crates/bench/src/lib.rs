//! Fixtures shared by the benchmarks.

use std::f64::consts::TAU;

use nobie_core::drive::DriveConfig;

/// The reference drive: Δ = 1e8 rad/s, default Ω_c and sample time.
pub fn qubit_config() -> DriveConfig {
    DriveConfig::default()
}

/// 64 noiseless Rabi samples on the default calibration grid.
pub fn rabi_samples(period: f64) -> (Vec<f64>, Vec<f64>) {
    let dt = qubit_config().dt();
    let t: Vec<f64> = (1..=64).map(|k| (16 * k) as f64 * dt).collect();
    let y = t.iter().map(|&t| 0.5 + 0.5 * (TAU * t / period).cos()).collect();
    (t, y)
}
