//! Test-only oracles and protocol generators, shared by the integration
//! suites of this crate and the acceptance suite of the CLI.
#![allow(dead_code)]

use nobie_core::protocol::SampledTrace;
use nobie_core::{ControlProtocol, PauliVector, QubitState};
use num_complex::Complex64 as C64;

/// `r(t) = c + A ∘ sin(ω t + φ)` componentwise; smooth with analytic `ṙ`.
#[derive(Clone, Copy, Debug)]
pub struct SmoothParams {
    pub offset: [f64; 3],
    pub amplitude: [f64; 3],
    pub omega: [f64; 3],
    pub phase: [f64; 3],
    pub duration: f64,
}

impl SmoothParams {
    /// Smallest `|r_k(t)|` over all components and times.
    pub fn min_component(&self) -> f64 {
        (0..3).map(|k| self.offset[k].abs() - self.amplitude[k].abs()).fold(f64::INFINITY, f64::min)
    }
}

pub fn smooth_protocol(p: SmoothParams) -> ControlProtocol {
    let value = move |t: f64| {
        PauliVector::from_array(std::array::from_fn(|k| {
            p.offset[k] + p.amplitude[k] * (p.omega[k] * t + p.phase[k]).sin()
        }))
    };
    let rate = move |t: f64| {
        PauliVector::from_array(std::array::from_fn(|k| {
            p.amplitude[k] * p.omega[k] * (p.omega[k] * t + p.phase[k]).cos()
        }))
    };
    ControlProtocol::with_derivatives("smooth", p.duration, value, rate).expect("positive duration")
}

/// Offsets of magnitude in `[1.5, 3]` with random sign, amplitudes below 0.5:
/// every component stays at least 1 away from zero.
pub fn params_from_unit(u: &[f64; 16]) -> SmoothParams {
    let sign = |v: f64| if v < 0.5 { -1.0 } else { 1.0 };
    SmoothParams {
        offset: std::array::from_fn(|k| sign(u[k]) * (1.5 + 1.5 * u[3 + k])),
        amplitude: std::array::from_fn(|k| 0.5 * u[6 + k]),
        omega: std::array::from_fn(|k| 0.2 + 2.8 * u[9 + k]),
        phase: std::array::from_fn(|k| std::f64::consts::TAU * u[12 + k]),
        duration: 1.0 + 4.0 * u[15],
    }
}

type Spinor = [C64; 2];

fn rhs(r: PauliVector, psi: &Spinor) -> Spinor {
    // -i (r·σ) ψ
    let minus_i = C64::new(0.0, -1.0);
    let h0 = C64::new(r.z, 0.0) * psi[0] + C64::new(r.x, -r.y) * psi[1];
    let h1 = C64::new(r.x, r.y) * psi[0] - C64::new(r.z, 0.0) * psi[1];
    [minus_i * h0, minus_i * h1]
}

fn axpy(psi: &Spinor, terms: &[(f64, &Spinor)], h: f64) -> Spinor {
    let mut out = *psi;
    for (c, k) in terms {
        out[0] += k[0] * (c * h);
        out[1] += k[1] * (c * h);
    }
    out
}

/// Adaptive Dormand-Prince 5(4) integration of `iψ' = (r_k·σ)ψ` through every
/// held sample of `trace`, never stepping more than `dt/resolution`.
pub fn dopri_sample_and_hold(trace: &SampledTrace, initial: QubitState, resolution: f64, rtol: f64) -> QubitState {
    const A21: f64 = 1.0 / 5.0;
    const A31: f64 = 3.0 / 40.0;
    const A32: f64 = 9.0 / 40.0;
    const A41: f64 = 44.0 / 45.0;
    const A42: f64 = -56.0 / 15.0;
    const A43: f64 = 32.0 / 9.0;
    const A51: f64 = 19372.0 / 6561.0;
    const A52: f64 = -25360.0 / 2187.0;
    const A53: f64 = 64448.0 / 6561.0;
    const A54: f64 = -212.0 / 729.0;
    const A61: f64 = 9017.0 / 3168.0;
    const A62: f64 = -355.0 / 33.0;
    const A63: f64 = 46732.0 / 5247.0;
    const A64: f64 = 49.0 / 176.0;
    const A65: f64 = -5103.0 / 18656.0;
    const B1: f64 = 35.0 / 384.0;
    const B3: f64 = 500.0 / 1113.0;
    const B4: f64 = 125.0 / 192.0;
    const B5: f64 = -2187.0 / 6784.0;
    const B6: f64 = 11.0 / 84.0;
    // fifth minus embedded fourth order weights
    const E1: f64 = 71.0 / 57600.0;
    const E3: f64 = -71.0 / 16695.0;
    const E4: f64 = 71.0 / 1920.0;
    const E5: f64 = -17253.0 / 339200.0;
    const E6: f64 = 22.0 / 525.0;
    const E7: f64 = -1.0 / 40.0;

    let dt = trace.dt();
    let h_max = dt / resolution;
    let mut psi: Spinor = [initial.c0, initial.c1];
    let mut h = h_max;
    for &r in trace.values() {
        let mut t = 0.0;
        while t < dt {
            let step = h.min(dt - t).min(h_max);
            let k1 = rhs(r, &psi);
            let k2 = rhs(r, &axpy(&psi, &[(A21, &k1)], step));
            let k3 = rhs(r, &axpy(&psi, &[(A31, &k1), (A32, &k2)], step));
            let k4 = rhs(r, &axpy(&psi, &[(A41, &k1), (A42, &k2), (A43, &k3)], step));
            let k5 = rhs(r, &axpy(&psi, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)], step));
            let k6 = rhs(r, &axpy(&psi, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], step));
            let next = axpy(&psi, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)], step);
            let k7 = rhs(r, &next);
            let err = axpy(
                &[C64::new(0.0, 0.0); 2],
                &[(E1, &k1), (E3, &k3), (E4, &k4), (E5, &k5), (E6, &k6), (E7, &k7)],
                step,
            );
            let scale = rtol * (1.0 + next[0].norm().max(next[1].norm()));
            let ratio = err[0].norm().max(err[1].norm()) / scale;
            if ratio <= 1.0 {
                psi = next;
                t += step;
            }
            let factor = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            h = (step * factor).min(h_max);
        }
    }
    QubitState { c0: psi[0], c1: psi[1] }
}

/// `P(|X/n - p| ≤ w)` for `X ~ Binomial(n, p)`, summed in log space.
pub fn binomial_window_probability(n: u64, p: f64, w: f64) -> f64 {
    let lo = ((p - w) * n as f64).ceil().max(0.0) as u64;
    let hi = ((p + w) * n as f64).floor().min(n as f64) as u64;
    let ln_fact = |k: u64| -> f64 { (1..=k).map(|i| (i as f64).ln()).sum() };
    let ln_n = ln_fact(n);
    // running log-factorials avoid the quadratic cost
    let mut total = 0.0;
    let mut ln_k = ln_fact(lo);
    let mut ln_nk = ln_fact(n - lo);
    for k in lo..=hi {
        if k > lo {
            ln_k += (k as f64).ln();
            ln_nk -= ((n - k + 1) as f64).ln();
        }
        total += (ln_n - ln_k - ln_nk + k as f64 * p.ln() + (n - k) as f64 * (1.0 - p).ln()).exp();
    }
    total
}
