//! The driven transmon qubit: `H_eff = -½Δ σz - Ω_d σx` with `Ω_d = d(t)·Ω_c`,
//! the NOBIE amplitude law, and digitized pulse schedules for hardware.

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliVector;
use crate::protocol::{finite_diff_derivatives, linear_ramp, ControlProtocol};

/// Hardware sampling time of the reference backend, in seconds.
pub const DEFAULT_DT: f64 = 0.22222222222222221e-9;

/// Calibrated maximum drive amplitude `Ω_c` of the reference backend, rad/s.
pub const DEFAULT_OMEGA_C: f64 = 535.54e6;

/// Calibrated qubit frequency of the reference backend, rad/s.
pub const DEFAULT_QUBIT_FREQ: f64 = 4.925035720219493e9 * 2.0 * PI;

/// Detuning used by the reference non-adiabatic experiment, rad/s.
pub const DEFAULT_DETUNING: f64 = 1e8;

/// Schedules bound for hardware must have a multiple of this many samples.
pub const HARDWARE_GRANULARITY: usize = 16;

/// In-phase drive: amplitude couples to `-σx`.
pub const PHASE_X: f64 = 0.0;

/// Quadrature drive: amplitude couples to `+σy`.
pub const PHASE_Y: f64 = FRAC_PI_2;

const PHASE_TOLERANCE: f64 = 1e-12;

/// Drive-line parameters. The detuning `Δ = ω_q - ω_d` is stored directly and
/// the drive frequency derived from it, so `Δ` carries no cancellation error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DriveConfig {
    qubit_freq: f64,
    detuning: f64,
    omega_c: f64,
    dt: f64,
}

impl Default for DriveConfig {
    fn default() -> Self {
        DriveConfig {
            qubit_freq: DEFAULT_QUBIT_FREQ,
            detuning: DEFAULT_DETUNING,
            omega_c: DEFAULT_OMEGA_C,
            dt: DEFAULT_DT,
        }
    }
}

impl DriveConfig {
    pub fn new(qubit_freq: f64, drive_freq: f64, omega_c: f64, dt: f64) -> Result<Self> {
        DriveConfig::default()
            .with_qubit_freq(qubit_freq)
            .with_detuning(qubit_freq - drive_freq)
            .with_omega_c(omega_c)?
            .with_dt(dt)
    }

    pub fn with_detuning(mut self, detuning: f64) -> Self {
        self.detuning = detuning;
        self
    }

    pub fn with_qubit_freq(mut self, qubit_freq: f64) -> Self {
        self.qubit_freq = qubit_freq;
        self
    }

    pub fn with_omega_c(mut self, omega_c: f64) -> Result<Self> {
        if !(omega_c > 0.0 && omega_c.is_finite()) {
            return Err(Error::InvalidConfig(format!("omega_c must be positive, got {omega_c}")));
        }
        self.omega_c = omega_c;
        Ok(self)
    }

    pub fn with_dt(mut self, dt: f64) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidConfig(format!("dt must be positive, got {dt}")));
        }
        self.dt = dt;
        Ok(self)
    }

    pub fn qubit_freq(&self) -> f64 {
        self.qubit_freq
    }

    pub fn drive_freq(&self) -> f64 {
        self.qubit_freq - self.detuning
    }

    pub fn detuning(&self) -> f64 {
        self.detuning
    }

    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }
}

type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A dimensionless amplitude envelope `d(t) ∈ [0, 1]`, optionally with `ḋ(t)`.
#[derive(Clone)]
pub struct DriveAmplitude {
    value: ScalarFn,
    rate: Option<ScalarFn>,
}

impl DriveAmplitude {
    pub fn new<V>(value: V) -> Self
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        DriveAmplitude { value: Arc::new(value), rate: None }
    }

    pub fn with_rate<V, R>(value: V, rate: R) -> Self
    where
        V: Fn(f64) -> f64 + Send + Sync + 'static,
        R: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        DriveAmplitude { value: Arc::new(value), rate: Some(Arc::new(rate)) }
    }

    pub fn constant(d: f64) -> Self {
        DriveAmplitude::with_rate(move |_| d, |_| 0.0)
    }

    /// `d(t) = d_max·t/τ`.
    pub fn linear(d_max: f64, tau: f64) -> Self {
        DriveAmplitude::with_rate(move |t| d_max * t / tau, move |_| d_max / tau)
    }

    pub fn at(&self, t: f64) -> f64 {
        (self.value)(t)
    }
}

impl fmt::Debug for DriveAmplitude {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DriveAmplitude").field("analytic_rate", &self.rate.is_some()).finish()
    }
}

/// Maps `d(t)` onto `x = -d(t)·Ω_c`, `y = 0`, `z = -Δ/2`.
pub fn effective_protocol(cfg: &DriveConfig, amplitude: &DriveAmplitude, tau: f64) -> Result<ControlProtocol> {
    let probe = ControlProtocol::constant("probe", PauliVector::ZERO, tau)?;
    for (index, t) in probe.scan_times(4096).enumerate() {
        let d = amplitude.at(t);
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::AmplitudeOutOfRange { index, value: d });
        }
    }
    let (omega_c, half_delta) = (cfg.omega_c(), 0.5 * cfg.detuning());
    let value = Arc::clone(&amplitude.value);
    let label = format!("effective(delta={:e}, omega_c={:e})", cfg.detuning(), omega_c);
    let to_vec = move |t: f64| PauliVector::new(-value(t) * omega_c, 0.0, -half_delta);
    match &amplitude.rate {
        Some(rate) => {
            let rate = Arc::clone(rate);
            ControlProtocol::with_derivatives(label, tau, to_vec, move |t| {
                PauliVector::new(-rate(t) * omega_c, 0.0, 0.0)
            })
        }
        None => {
            let p = ControlProtocol::with_derivatives(label, tau, to_vec, |_| PauliVector::ZERO)?;
            Ok(finite_diff_derivatives(&p, cfg.dt() / 10.0))
        }
    }
}

/// The single-control NOBIE amplitude `Ω'_d = Δ Ω̇_d / (4 ((Δ/2)² + Ω_d²))`,
/// applied on `σy` at resonance.
pub fn nobie_amplitude(cfg: &DriveConfig, omega_d: f64, omega_d_dot: f64) -> Result<f64> {
    let delta = cfg.detuning();
    let f2 = 0.25 * delta * delta + omega_d * omega_d;
    if f2 == 0.0 {
        return Err(Error::DegenerateSpectrum { time: f64::NAN, magnitude: 0.0 });
    }
    Ok(delta * omega_d_dot / (4.0 * f2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScheduleFamily {
    /// Counter-drive from the mutually independent NOBIE solution.
    Nobie,
    /// Bare linear amplitude ramp, detuned carrier.
    Linear,
    /// Resonant constant pulse (Rabi calibration).
    Constant,
}

impl ScheduleFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            ScheduleFamily::Nobie => "nobie",
            ScheduleFamily::Linear => "linear",
            ScheduleFamily::Constant => "constant",
        }
    }
}

impl fmt::Display for ScheduleFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ScheduleFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nobie" => Ok(ScheduleFamily::Nobie),
            "linear" => Ok(ScheduleFamily::Linear),
            "constant" => Ok(ScheduleFamily::Constant),
            other => Err(Error::InvalidConfig(format!("unknown schedule family `{other}`"))),
        }
    }
}

/// How a schedule was generated; enough to rebuild its source protocol.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleOrigin {
    pub family: ScheduleFamily,
    /// Detuning `Δ` of the protocol being shortcut (or driven), rad/s.
    pub detuning: f64,
    pub omega_c: f64,
    /// Ramp endpoint `d_max` (linear, nobie) or constant level (constant).
    pub d_max: f64,
}

/// A digitized single-channel drive.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSchedule {
    dt: f64,
    amplitudes: Vec<f64>,
    frequency: f64,
    phase: f64,
    label: String,
    hardware_bound: bool,
    origin: Option<ScheduleOrigin>,
}

impl PulseSchedule {
    /// Checks every amplitude lies in `[0, 1]`; nothing is clipped.
    pub fn new(dt: f64, amplitudes: Vec<f64>, frequency: f64, phase: f64, label: impl Into<String>) -> Result<Self> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidDuration(dt));
        }
        if amplitudes.is_empty() {
            return Err(Error::InvalidConfig("schedule has no samples".into()));
        }
        if let Some((index, &value)) = amplitudes.iter().enumerate().find(|(_, a)| !(0.0..=1.0).contains(*a)) {
            return Err(Error::AmplitudeOutOfRange { index, value });
        }
        Ok(PulseSchedule { dt, amplitudes, frequency, phase, label: label.into(), hardware_bound: false, origin: None })
    }

    pub fn with_origin(mut self, origin: ScheduleOrigin) -> Self {
        self.origin = Some(origin);
        self
    }

    /// Marks the schedule for hardware, which requires `n_samples % 16 == 0`.
    pub fn hardware_bound(mut self) -> Result<Self> {
        if !self.n_samples().is_multiple_of(HARDWARE_GRANULARITY) {
            return Err(Error::InvalidConfig(format!(
                "hardware schedules need a multiple of {HARDWARE_GRANULARITY} samples, got {}",
                self.n_samples()
            )));
        }
        self.hardware_bound = true;
        Ok(self)
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn phase(&self) -> f64 {
        self.phase
    }

    pub fn n_samples(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn duration(&self) -> f64 {
        self.n_samples() as f64 * self.dt
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_hardware_bound(&self) -> bool {
        self.hardware_bound
    }

    pub fn origin(&self) -> Option<&ScheduleOrigin> {
        self.origin.as_ref()
    }

    pub fn is_quadrature(&self) -> Result<bool> {
        if (self.phase - PHASE_X).abs() <= PHASE_TOLERANCE {
            Ok(false)
        } else if (self.phase - PHASE_Y).abs() <= PHASE_TOLERANCE {
            Ok(true)
        } else {
            Err(Error::UnsupportedPhase(self.phase))
        }
    }
}

fn midpoint(k: usize, dt: f64) -> f64 {
    (k as f64 + 0.5) * dt
}

fn check_samples(tau_samples: usize) -> Result<()> {
    if tau_samples == 0 {
        return Err(Error::InvalidConfig("tau_samples must be positive".into()));
    }
    Ok(())
}

fn check_fraction(d: f64) -> Result<()> {
    if (0.0..=1.0).contains(&d) {
        Ok(())
    } else {
        Err(Error::AmplitudeOutOfRange { index: 0, value: d })
    }
}

/// The linear ramp `Ω_d = d_max·Ω_c·t/τ` underlying both ramp schedules.
pub fn ramp_protocol(cfg: &DriveConfig, tau_samples: usize, d_max: f64) -> Result<ControlProtocol> {
    check_samples(tau_samples)?;
    linear_ramp(d_max * cfg.omega_c(), cfg.detuning(), tau_samples as f64 * cfg.dt())
}

/// Resonant σy counter-drive that shortcuts the linear ramp to `ramp_max_fraction`.
///
/// Sample `k` holds `Ω'_d(t_k)/Ω_c` at the midpoint `t_k`; the carrier sits on
/// the qubit frequency with a π/2 phase.
pub fn generate_nobie_schedule(cfg: &DriveConfig, tau_samples: usize, ramp_max_fraction: f64) -> Result<PulseSchedule> {
    check_samples(tau_samples)?;
    check_fraction(ramp_max_fraction)?;
    if cfg.detuning() == 0.0 {
        return Err(Error::DegenerateSpectrum { time: 0.0, magnitude: 0.0 });
    }
    let tau = tau_samples as f64 * cfg.dt();
    let omega_max = ramp_max_fraction * cfg.omega_c();
    let omega_dot = omega_max / tau;
    let amplitudes = (0..tau_samples)
        .map(|k| {
            let omega_d = omega_max * midpoint(k, cfg.dt()) / tau;
            nobie_amplitude(cfg, omega_d, omega_dot).map(|w| w / cfg.omega_c())
        })
        .collect::<Result<Vec<_>>>()?;
    let label = format!("nobie/tau={tau_samples}/delta={:e}", cfg.detuning());
    Ok(PulseSchedule::new(cfg.dt(), amplitudes, cfg.qubit_freq(), PHASE_Y, label)?.with_origin(ScheduleOrigin {
        family: ScheduleFamily::Nobie,
        detuning: cfg.detuning(),
        omega_c: cfg.omega_c(),
        d_max: ramp_max_fraction,
    }))
}

/// In-phase linear ramp `d(t_k) = d_max·t_k/τ` on a carrier detuned by `Δ`.
pub fn generate_linear_schedule(cfg: &DriveConfig, tau_samples: usize, d_max: f64) -> Result<PulseSchedule> {
    check_samples(tau_samples)?;
    check_fraction(d_max)?;
    let tau = tau_samples as f64 * cfg.dt();
    let amplitudes = (0..tau_samples).map(|k| d_max * midpoint(k, cfg.dt()) / tau).collect();
    let label = format!("linear/tau={tau_samples}/delta={:e}", cfg.detuning());
    Ok(PulseSchedule::new(cfg.dt(), amplitudes, cfg.drive_freq(), PHASE_X, label)?.with_origin(ScheduleOrigin {
        family: ScheduleFamily::Linear,
        detuning: cfg.detuning(),
        omega_c: cfg.omega_c(),
        d_max,
    }))
}

/// Resonant in-phase constant pulse of level `d`, for Rabi calibration.
pub fn generate_constant_schedule(cfg: &DriveConfig, n_samples: usize, d: f64) -> Result<PulseSchedule> {
    check_samples(n_samples)?;
    check_fraction(d)?;
    let label = format!("constant/n={n_samples}/d={d}");
    Ok(PulseSchedule::new(cfg.dt(), vec![d; n_samples], cfg.qubit_freq(), PHASE_X, label)?.with_origin(
        ScheduleOrigin { family: ScheduleFamily::Constant, detuning: 0.0, omega_c: cfg.omega_c(), d_max: d },
    ))
}
