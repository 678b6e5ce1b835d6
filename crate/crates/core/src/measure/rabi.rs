use std::f64::consts::{PI, TAU};

use nalgebra::{Matrix4, Vector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `p0(t) ≈ offset + amplitude·cos(2πt/period + phase)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RabiFit {
    /// Seconds.
    pub period: f64,
    pub amplitude: f64,
    pub offset: f64,
    /// Radians, in `(-π, π]`.
    pub phase: f64,
    pub residual_rms: f64,
}

impl RabiFit {
    pub fn eval(&self, t: f64) -> f64 {
        self.offset + self.amplitude * (TAU * t / self.period + self.phase).cos()
    }
}

const MIN_POINTS: usize = 8;
const MAX_ITERATIONS: usize = 1000;
const MAX_REJECTIONS: usize = 50;
/// Residual level indistinguishable from rounding for data in `[0, 1]`.
const ROUNDOFF_RMS: f64 = 1e-12;

fn wrap_phase(phi: f64) -> f64 {
    let w = phi.rem_euclid(TAU);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Parameters in normalized time `s = (t - t0)/span`: `[B, A, ν, φ]` with ν in
/// cycles per span.
type Params = Vector4<f64>;

fn model(p: &Params, s: f64) -> f64 {
    p[0] + p[1] * (TAU * p[2] * s + p[3]).cos()
}

fn sse(p: &Params, s: &[f64], y: &[f64]) -> f64 {
    s.iter().zip(y).map(|(&si, &yi)| (yi - model(p, si)).powi(2)).sum()
}

/// Frequency (cycles per span) of the largest periodogram peak, scanned from
/// 3/4 cycle up to the Nyquist rate of the finest spacing.
fn dominant_frequency(s: &[f64], y: &[f64]) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let mut sorted = s.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min_gap = sorted.windows(2).map(|w| w[1] - w[0]).filter(|g| *g > 0.0).fold(f64::INFINITY, f64::min);
    let nyquist = 0.5 / min_gap;
    let resolution = 0.02;
    let steps = ((nyquist - 0.75) / resolution).ceil().max(1.0) as usize;
    (0..=steps)
        .map(|k| 0.75 + k as f64 * resolution)
        .map(|nu| {
            let (mut re, mut im) = (0.0, 0.0);
            for (&si, &yi) in s.iter().zip(y) {
                let (sin, cos) = (TAU * nu * si).sin_cos();
                re += (yi - mean) * cos;
                im -= (yi - mean) * sin;
            }
            (nu, re * re + im * im)
        })
        .fold((0.75, f64::NEG_INFINITY), |best, cur| if cur.1 > best.1 { cur } else { best })
        .0
}

/// Least-squares cosine fit of `(t, p0)` data.
///
/// The frequency starts at the dominant Fourier peak, amplitude and offset at
/// the data range, and the phase at the first sample; a damped Gauss-Newton
/// (Levenberg-Marquardt) iteration then refines all four parameters.
pub fn rabi_fit(durations: &[f64], p0_means: &[f64]) -> Result<RabiFit> {
    if durations.len() != p0_means.len() {
        return Err(Error::InsufficientData(format!(
            "{} durations but {} probabilities",
            durations.len(),
            p0_means.len()
        )));
    }
    if durations.len() < MIN_POINTS {
        return Err(Error::InsufficientData(format!("need at least {MIN_POINTS} points, got {}", durations.len())));
    }
    if durations.iter().chain(p0_means).any(|v| !v.is_finite()) {
        return Err(Error::InsufficientData("non-finite sample".into()));
    }
    let t0 = durations.iter().copied().fold(f64::INFINITY, f64::min);
    let t1 = durations.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = t1 - t0;
    if span <= 0.0 {
        return Err(Error::InsufficientData("durations do not span an interval".into()));
    }
    let s: Vec<f64> = durations.iter().map(|t| (t - t0) / span).collect();
    let y = p0_means;

    let (lo, hi) = y.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    if hi - lo < 1e-12 {
        return Err(Error::FitDiverged("data show no oscillation".into()));
    }

    let nu = dominant_frequency(&s, y);
    let (offset, amplitude) = (0.5 * (hi + lo), 0.5 * (hi - lo));
    let first = s.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).map(|(i, _)| i).unwrap_or(0);
    let c = ((y[first] - offset) / amplitude).clamp(-1.0, 1.0).acos();
    let mut p = [c, -c]
        .iter()
        .map(|&phi| Params::new(offset, amplitude, nu, phi - TAU * nu * s[first]))
        .min_by(|a, b| sse(a, &s, y).total_cmp(&sse(b, &s, y)))
        .expect("two candidates");

    let mut cost = sse(&p, &s, y);
    let mut lambda = 1e-3;
    let mut rejections = 0;
    for _ in 0..MAX_ITERATIONS {
        let mut jtj = Matrix4::<f64>::zeros();
        let mut jtr = Vector4::<f64>::zeros();
        for (&si, &yi) in s.iter().zip(y) {
            let theta = TAU * p[2] * si + p[3];
            let (sin, cos) = theta.sin_cos();
            let j = Vector4::new(1.0, cos, -p[1] * sin * TAU * si, -p[1] * sin);
            jtj += j * j.transpose();
            jtr += j * (yi - model(&p, si));
        }
        if cost < 1e-28 * y.len() as f64 {
            break;
        }
        let mut damped = jtj;
        for k in 0..4 {
            damped[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
        }
        let step = damped.lu().solve(&jtr).unwrap_or_else(Vector4::zeros);
        let candidate = p + step;
        let candidate_cost = sse(&candidate, &s, y);
        if candidate_cost < cost {
            let improvement = (cost - candidate_cost) / cost;
            p = candidate;
            cost = candidate_cost;
            lambda = (lambda / 3.0).max(1e-12);
            rejections = 0;
            if improvement < 1e-15 {
                break;
            }
        } else {
            lambda *= 4.0;
            rejections += 1;
            if rejections >= MAX_REJECTIONS {
                // no step helps: fine at a stationary point, otherwise stuck
                let predicted = jtj.lu().solve(&jtr).map_or(f64::INFINITY, |d| jtr.dot(&d));
                if cost <= ROUNDOFF_RMS.powi(2) * y.len() as f64 || predicted <= 1e-10 * cost {
                    break;
                }
                return Err(Error::FitDiverged(format!(
                    "no residual reduction in {MAX_REJECTIONS} iterations (rms {:e})",
                    (cost / y.len() as f64).sqrt()
                )));
            }
        }
    }

    let (mut amp, mut phase, nu) = (p[1], p[3], p[2]);
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::FitDiverged(format!("non-physical frequency {nu}")));
    }
    if amp.abs() < 1e-9 {
        return Err(Error::FitDiverged("fitted amplitude vanished".into()));
    }
    if amp < 0.0 {
        amp = -amp;
        phase += PI;
    }
    let period = span / nu;
    if span < period {
        return Err(Error::InsufficientData(format!(
            "data span {span:e} s is shorter than the fitted period {period:e} s"
        )));
    }
    Ok(RabiFit {
        period,
        amplitude: amp,
        offset: p[0],
        phase: wrap_phase(phase - TAU * t0 / period),
        residual_rms: (cost / y.len() as f64).sqrt(),
    })
}

/// `Ω_c = π/(T·d)`: resonant drive at level `d` precesses at `2dΩ_c`.
pub fn omega_c_from_period(period: f64, d: f64) -> Result<f64> {
    if !(period > 0.0 && period.is_finite()) {
        return Err(Error::InvalidDuration(period));
    }
    if !(d > 0.0 && d <= 1.0) {
        return Err(Error::InvalidAmplitude(d));
    }
    Ok(PI / (period * d))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
}

impl LineFit {
    pub fn eval(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// Ordinary least-squares line through `(x, y)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "line fit needs ≥ 2 paired points, got {}",
            xs.len().min(ys.len())
        )));
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(LineFit { slope, intercept: my - slope * mx })
}

/// Mean over `d ∈ [0, 1]` of the least-squares line through `(d, Ω_c)`,
/// i.e. its value at `d = ½`.
pub fn omega_c_select(d_values: &[f64], omega_values: &[f64]) -> Result<f64> {
    Ok(fit_line(d_values, omega_values)?.eval(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cosine(period: f64, n: usize, periods: f64) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..n).map(|k| k as f64 * periods * period / (n - 1) as f64).collect();
        let y = t.iter().map(|&t| 0.5 + 0.5 * (TAU * t / period).cos()).collect();
        (t, y)
    }

    #[test]
    fn noiseless_recovery() {
        let period = 58.66e-9;
        let (t, y) = cosine(period, 40, 2.0);
        let fit = rabi_fit(&t, &y).unwrap();
        assert!((fit.period / period - 1.0).abs() < 1e-3);
        assert!(fit.residual_rms < 1e-10, "{}", fit.residual_rms);
        assert!((fit.amplitude - 0.5).abs() < 1e-8);
        assert!((fit.offset - 0.5).abs() < 1e-8);
        assert!(fit.phase.abs() < 1e-6);
    }

    #[test]
    fn offset_phase_recovered() {
        let period = 11.7e-9;
        let t: Vec<f64> = (1..=64).map(|k| k as f64 * 16.0 * 0.22222222222222221e-9).collect();
        let y: Vec<f64> = t.iter().map(|&t| 0.48 + 0.45 * (TAU * t / period + 0.7).cos()).collect();
        let fit = rabi_fit(&t, &y).unwrap();
        assert!((fit.period / period - 1.0).abs() < 1e-9);
        assert!((fit.phase - 0.7).abs() < 1e-7);
        for (&ti, &yi) in t.iter().zip(&y) {
            assert!((fit.eval(ti) - yi).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_input_rejected() {
        let t: Vec<f64> = (0..20).map(|k| k as f64).collect();
        assert!(matches!(rabi_fit(&t, &[0.5; 20]), Err(Error::FitDiverged(_))));
    }

    #[test]
    fn too_few_points() {
        let (t, y) = cosine(1.0, 7, 2.0);
        assert!(matches!(rabi_fit(&t, &y), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn period_to_omega_c() {
        let w = omega_c_from_period(58.66e-9, 0.1).unwrap();
        assert!((w / 5.3554e8 - 1.0).abs() < 5e-4, "{w}");
        assert!((omega_c_from_period(PI, 1.0).unwrap() - 1.0).abs() < 1e-15);
        // doubling d at fixed Ω_c halves T
        let t1 = PI / (0.2 * 5e8);
        let t2 = PI / (0.4 * 5e8);
        assert_eq!(omega_c_from_period(t1, 0.2).unwrap(), omega_c_from_period(t2, 0.4).unwrap());
        assert!((t2 / t1 - 0.5).abs() < 1e-15);
        assert!(matches!(omega_c_from_period(1e-9, 0.0), Err(Error::InvalidAmplitude(_))));
        assert!(matches!(omega_c_from_period(1e-9, -0.1), Err(Error::InvalidAmplitude(_))));
    }

    #[test]
    fn line_selection() {
        assert_eq!(omega_c_select(&[0.1, 0.2, 0.3], &[5e8; 3]).unwrap(), 5e8);
        let w = omega_c_select(&[0.1, 0.5], &[540e6, 531e6]).unwrap();
        assert!((w - 531e6).abs() < 1e-6);
        assert!(matches!(omega_c_select(&[0.1], &[5e8]), Err(Error::InsufficientData(_))));
    }
}
