use serde::{Deserialize, Serialize};

use crate::drive::{generate_constant_schedule, DriveConfig, HARDWARE_GRANULARITY};
use crate::error::{Error, Result};

use super::rabi::{fit_line, omega_c_from_period, omega_c_select, rabi_fit, LineFit, RabiFit};
use super::shots::{exact_p0, mean, sample_counts, ShotConfig};

/// Constant-pulse durations `start, start + step, ...` in samples.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DurationGrid {
    pub start_samples: usize,
    pub step_samples: usize,
    pub count: usize,
}

impl Default for DurationGrid {
    fn default() -> Self {
        DurationGrid { start_samples: HARDWARE_GRANULARITY, step_samples: HARDWARE_GRANULARITY, count: 64 }
    }
}

impl DurationGrid {
    pub fn samples(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.count).map(move |k| self.start_samples + k * self.step_samples)
    }

    fn validate(&self) -> Result<()> {
        if self.start_samples == 0 || self.step_samples == 0 {
            return Err(Error::InvalidConfig("duration grid must start and step at ≥ 1 sample".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationPoint {
    pub d: f64,
    pub duration_samples: Vec<usize>,
    pub mean_p0: Vec<f64>,
    pub fit: RabiFit,
    pub omega_c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CalibrationReport {
    pub points: Vec<CalibrationPoint>,
    /// `Ω_c` against `d`; absent with a single level.
    pub line: Option<LineFit>,
    pub selected_omega_c: f64,
}

/// Rabi experiment at each level in `d_values`, simulated against the drive
/// strength in `cfg`, and the resulting `Ω_c` estimate.
pub fn calibrate(
    cfg: &DriveConfig,
    d_values: &[f64],
    grid: &DurationGrid,
    shots: &ShotConfig,
) -> Result<CalibrationReport> {
    grid.validate()?;
    shots.validate()?;
    if d_values.is_empty() {
        return Err(Error::InsufficientData("no calibration levels".into()));
    }
    let mut points = Vec::with_capacity(d_values.len());
    for &d in d_values {
        if !(d > 0.0 && d <= 1.0) {
            return Err(Error::InvalidAmplitude(d));
        }
        let duration_samples: Vec<usize> = grid.samples().collect();
        let mean_p0 = duration_samples
            .iter()
            .map(|&n| {
                let schedule = generate_constant_schedule(cfg, n, d)?;
                let p0 = exact_p0(&schedule, cfg, false)?;
                Ok(mean(&sample_counts(p0, shots, schedule.label())?))
            })
            .collect::<Result<Vec<_>>>()?;
        let times: Vec<f64> = duration_samples.iter().map(|&n| n as f64 * cfg.dt()).collect();
        let fit = rabi_fit(&times, &mean_p0)?;
        let omega_c = omega_c_from_period(fit.period, d)?;
        points.push(CalibrationPoint { d, duration_samples, mean_p0, fit, omega_c });
    }
    let ds: Vec<f64> = points.iter().map(|p| p.d).collect();
    let ws: Vec<f64> = points.iter().map(|p| p.omega_c).collect();
    let distinct = ds.iter().any(|&d| d != ds[0]);
    let (line, selected_omega_c) =
        if distinct { (Some(fit_line(&ds, &ws)?), omega_c_select(&ds, &ws)?) } else { (None, mean(&ws)) };
    Ok(CalibrationReport { points, line, selected_omega_c })
}
