//! Shot-noise sampling, Rabi fitting and drive-strength calibration.

mod calibration;
mod rabi;
mod shots;

pub use calibration::{calibrate, CalibrationPoint, CalibrationReport, DurationGrid};
pub use rabi::{fit_line, omega_c_from_period, omega_c_select, rabi_fit, LineFit, RabiFit};
pub use shots::{
    exact_p0, record_rng, run_experiment, sample_counts, Origin, RunRecord, ShotConfig, DEFAULT_REPEATS, DEFAULT_SHOTS,
};
