//! Finite-time Schrödinger evolution under sample-and-hold controls, and the
//! observables used to judge adiabaticity.

use crate::drive::{DriveConfig, PulseSchedule};
use crate::error::{Error, Result};
use crate::pauli::{eigensystem_with_scale, expm_step, PauliVector, QubitState, Unitary2};
use crate::protocol::{ControlProtocol, SampledTrace};

/// States recorded after propagation steps.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// Post-step instants `(k + 1)·dt` of the recorded states.
    pub times: Vec<f64>,
    pub states: Vec<QubitState>,
    pub initial: QubitState,
}

impl Trajectory {
    pub fn final_state(&self) -> QubitState {
        self.states.last().copied().unwrap_or(self.initial)
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Propagates `initial` through every held sample of `trace`, recording each step.
pub fn propagate(trace: &SampledTrace, initial: QubitState) -> Trajectory {
    propagate_decimated(trace, initial, 1)
}

/// Like [`propagate`] but records only every `every`-th step (the final state is
/// always recorded).
pub fn propagate_decimated(trace: &SampledTrace, initial: QubitState, every: usize) -> Trajectory {
    let every = every.max(1);
    let dt = trace.dt();
    let n = trace.n_samples();
    let mut times = Vec::with_capacity(n / every + 1);
    let mut states = Vec::with_capacity(n / every + 1);
    let mut psi = initial;
    for (k, r) in trace.values().iter().enumerate() {
        psi = expm_step(*r, dt).apply(&psi);
        if (k + 1) % every == 0 || k + 1 == n {
            times.push((k + 1) as f64 * dt);
            states.push(psi);
        }
    }
    Trajectory { times, states, initial }
}

/// Final state only, without storing the trajectory.
pub fn evolve_final(trace: &SampledTrace, initial: QubitState) -> QubitState {
    let dt = trace.dt();
    trace.values().iter().fold(initial, |psi, r| expm_step(*r, dt).apply(&psi))
}

/// Held Pauli vector of every schedule sample under `cfg`.
///
/// The carrier offset gives `z = -(ω_q - ω)/2`; amplitude `d_k·Ω_c` goes on `-σx`
/// for phase 0 and on `+σy` for phase π/2.
pub fn schedule_trace(s: &PulseSchedule, cfg: &DriveConfig) -> Result<SampledTrace> {
    let quadrature = s.is_quadrature()?;
    let z = -0.5 * (cfg.qubit_freq() - s.frequency());
    let omega_c = cfg.omega_c();
    let values =
        s.amplitudes()
            .iter()
            .map(|&d| {
                if quadrature {
                    PauliVector::new(0.0, d * omega_c, z)
                } else {
                    PauliVector::new(-d * omega_c, 0.0, z)
                }
            })
            .collect();
    SampledTrace::from_values(s.dt(), values)
}

pub fn propagate_schedule(s: &PulseSchedule, cfg: &DriveConfig, initial: QubitState) -> Result<Trajectory> {
    Ok(propagate(&schedule_trace(s, cfg)?, initial))
}

/// `|⟨0|ψ⟩|²`.
pub fn ground_probability(s: &QubitState) -> f64 {
    s.c0.norm_sqr()
}

/// `|⟨0|h|ψ⟩|² = |c0 + c1|²/2`: close to 1 near `(|0⟩ + |1⟩)/√2`.
pub fn hadamard_discriminate(s: &QubitState) -> f64 {
    ground_probability(&Unitary2::hadamard().apply(s))
}

/// `|⟨0|λ₋⟩|²` for `H = -½Δ σz - Ω_d σx`.
pub fn adiabatic_reference(delta: f64, omega_d: f64) -> Result<f64> {
    let a = 0.5 * delta;
    let f = a.hypot(omega_d);
    if f == 0.0 {
        return Err(Error::DegenerateSpectrum { time: f64::NAN, magnitude: 0.0 });
    }
    let w2 = omega_d * omega_d;
    // Ω²/(Ω² + (f - a)²), rewritten without the f - a cancellation when a > 0
    if a > 0.0 {
        let s = (f + a).powi(2);
        Ok(s / (s + w2))
    } else {
        Ok(w2 / (w2 + (f - a).powi(2)))
    }
}

/// `|⟨0|h|λ₋⟩|²`, the discrimination value an adiabatic evolution would show.
pub fn adiabatic_discrimination(delta: f64, omega_d: f64) -> Result<f64> {
    let r = PauliVector::new(-omega_d, 0.0, -0.5 * delta);
    let e = eigensystem_with_scale(r, r.magnitude().max(1.0))
        .map_err(|_| Error::DegenerateSpectrum { time: f64::NAN, magnitude: 0.0 })?;
    Ok(hadamard_discriminate(&e.v_minus))
}

/// `F(t_k) = |⟨λ₋(t_k)|ψ(t_k)⟩|²` for every recorded instant, with `λ₋` the
/// instantaneous ground state of `p`.
///
/// This is the occupation `|c₋|²` of the lower eigenstate; an adiabatic
/// evolution from `λ₋(0)` keeps it at 1.
pub fn instantaneous_fidelity(traj: &Trajectory, p: &ControlProtocol) -> Result<Vec<f64>> {
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, psi)| {
            let r = p.at(t);
            let e = eigensystem_with_scale(r, 1.0)
                .map_err(|_| Error::DegenerateSpectrum { time: t, magnitude: r.magnitude() })?;
            Ok(e.v_minus.overlap(psi))
        })
        .collect()
}
