//! Time-dependent control protocols `r(t) = (x(t), y(t), z(t))` and their
//! digitization onto a fixed hardware sampling grid.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::pauli::PauliVector;

/// A vector-valued function of time.
pub type VectorFn = Arc<dyn Fn(f64) -> PauliVector + Send + Sync>;

/// Relative tolerance for `n·dt = τ`.
pub const COMMENSURABILITY_TOLERANCE: f64 = 1e-9;

/// Where a protocol's time derivatives come from.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum DerivativeSource {
    Analytic,
    /// Central differences with step `h` (one-sided at the endpoints).
    FiniteDifference {
        h: f64,
    },
}

/// Control parameters of `H(t) = x σx + y σy + z σz` on `[0, τ]`.
#[derive(Clone)]
pub struct ControlProtocol {
    value: VectorFn,
    rate: VectorFn,
    derivatives: DerivativeSource,
    duration: f64,
    label: String,
}

impl fmt::Debug for ControlProtocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ControlProtocol")
            .field("label", &self.label)
            .field("duration", &self.duration)
            .field("derivatives", &self.derivatives)
            .finish_non_exhaustive()
    }
}

fn check_duration(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDuration(tau))
    }
}

impl ControlProtocol {
    /// Protocol with analytic derivatives.
    pub fn with_derivatives<V, R>(label: impl Into<String>, duration: f64, value: V, rate: R) -> Result<Self>
    where
        V: Fn(f64) -> PauliVector + Send + Sync + 'static,
        R: Fn(f64) -> PauliVector + Send + Sync + 'static,
    {
        check_duration(duration)?;
        Ok(ControlProtocol {
            value: Arc::new(value),
            rate: Arc::new(rate),
            derivatives: DerivativeSource::Analytic,
            duration,
            label: label.into(),
        })
    }

    /// Protocol without derivatives; a finite-difference fallback with
    /// `h = τ·1e-5` is attached and flagged as approximate.
    pub fn new<V>(label: impl Into<String>, duration: f64, value: V) -> Result<Self>
    where
        V: Fn(f64) -> PauliVector + Send + Sync + 'static,
    {
        let p = ControlProtocol::with_derivatives(label, duration, value, |_| PauliVector::ZERO)?;
        Ok(finite_diff_derivatives(&p, duration * 1e-5))
    }

    /// Time-independent protocol.
    pub fn constant(label: impl Into<String>, r: PauliVector, duration: f64) -> Result<Self> {
        ControlProtocol::with_derivatives(label, duration, move |_| r, |_| PauliVector::ZERO)
    }

    pub fn at(&self, t: f64) -> PauliVector {
        (self.value)(t)
    }

    pub fn rate(&self, t: f64) -> PauliVector {
        (self.rate)(t)
    }

    /// `f(t) = |r(t)|`.
    pub fn magnitude(&self, t: f64) -> f64 {
        self.at(t).magnitude()
    }

    /// `ḟ = (r·ṙ)/f`.
    pub fn magnitude_rate(&self, t: f64) -> f64 {
        let r = self.at(t);
        r.dot(self.rate(t)) / r.magnitude()
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn derivatives(&self) -> DerivativeSource {
        self.derivatives
    }

    pub fn has_approximate_derivatives(&self) -> bool {
        matches!(self.derivatives, DerivativeSource::FiniteDifference { .. })
    }

    /// `n + 1` equally spaced instants covering `[0, τ]`.
    pub fn scan_times(&self, n: usize) -> impl Iterator<Item = f64> + '_ {
        let n = n.max(1);
        (0..=n).map(move |k| self.duration * k as f64 / n as f64)
    }
}

/// `x(t) = -Ω_max·t/τ`, `y = 0`, `z = -Δ/2`: the driven qubit under a linear
/// amplitude ramp.
pub fn linear_ramp(omega_max: f64, delta: f64, tau: f64) -> Result<ControlProtocol> {
    check_duration(tau)?;
    let slope = omega_max / tau;
    ControlProtocol::with_derivatives(
        format!("linear-ramp(omega_max={omega_max:e}, delta={delta:e})"),
        tau,
        move |t| PauliVector::new(-slope * t, 0.0, -0.5 * delta),
        move |_| PauliVector::new(-slope, 0.0, 0.0),
    )
}

/// Replaces the derivatives of `p` with central differences of step `h`.
///
/// Within `h` of an endpoint the second-order one-sided stencil is used so that
/// `p` is never sampled outside `[0, τ]`.
pub fn finite_diff_derivatives(p: &ControlProtocol, h: f64) -> ControlProtocol {
    let value = Arc::clone(&p.value);
    let tau = p.duration;
    let rate = move |t: f64| {
        let v = |s: f64| value(s);
        if t - h < 0.0 {
            (v(t) * -3.0 + v(t + h) * 4.0 - v(t + 2.0 * h)) * (0.5 / h)
        } else if t + h > tau {
            (v(t) * 3.0 - v(t - h) * 4.0 + v(t - 2.0 * h)) * (0.5 / h)
        } else {
            (v(t + h) - v(t - h)) * (0.5 / h)
        }
    };
    ControlProtocol {
        value: Arc::clone(&p.value),
        rate: Arc::new(rate),
        derivatives: DerivativeSource::FiniteDifference { h },
        duration: p.duration,
        label: p.label.clone(),
    }
}

/// A protocol sampled at the midpoints `t_k = (k + ½)·dt` and held constant
/// over each interval `[k·dt, (k+1)·dt)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledTrace {
    dt: f64,
    sample_times: Vec<f64>,
    values: Vec<PauliVector>,
}

impl SampledTrace {
    /// Trace from explicit held values, one per interval of length `dt`.
    pub fn from_values(dt: f64, values: Vec<PauliVector>) -> Result<Self> {
        check_duration(dt)?;
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteControl((k as f64 + 0.5) * dt));
        }
        let sample_times = (0..values.len()).map(|k| (k as f64 + 0.5) * dt).collect();
        Ok(SampledTrace { dt, sample_times, values })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn n_samples(&self) -> usize {
        self.values.len()
    }

    pub fn duration(&self) -> f64 {
        self.n_samples() as f64 * self.dt
    }

    pub fn sample_times(&self) -> &[f64] {
        &self.sample_times
    }

    pub fn values(&self) -> &[PauliVector] {
        &self.values
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Number of whole samples of length `dt` in `tau`, if commensurate.
pub fn sample_count(tau: f64, dt: f64) -> Result<usize> {
    check_duration(dt)?;
    check_duration(tau)?;
    let n = (tau / dt).round();
    if n < 1.0 || (n * dt - tau).abs() > COMMENSURABILITY_TOLERANCE * tau {
        return Err(Error::NonCommensurateDuration { duration: tau, dt });
    }
    Ok(n as usize)
}

/// Midpoint-samples `p` onto a grid of step `dt`.
pub fn digitize(p: &ControlProtocol, dt: f64) -> Result<SampledTrace> {
    let n = sample_count(p.duration(), dt)?;
    let values = (0..n).map(|k| p.at((k as f64 + 0.5) * dt)).collect();
    SampledTrace::from_values(dt, values)
}
