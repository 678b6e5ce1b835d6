//! Certification of a schedule against the protocol it was generated from.

use serde::{Deserialize, Serialize};

use crate::drive::{ramp_protocol, DriveConfig, PulseSchedule, ScheduleFamily, PHASE_X};
use crate::error::{Error, Result};
use crate::evolve::{instantaneous_fidelity, propagate, schedule_trace};
use crate::nobie::{
    independent_solution, invariance_residual, main_conditions_residual, Axis, NobieSolution, SCAN_POINTS,
};
use crate::pauli::{eigensystem_with_scale, PauliVector};
use crate::protocol::ControlProtocol;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyTolerance {
    /// Bound on `residual/f` (invariance) and `residual/f²` (main conditions).
    pub residual: f64,
    /// Bound on `1 - min F`.
    pub fidelity: f64,
}

impl Default for VerifyTolerance {
    fn default() -> Self {
        VerifyTolerance { residual: 1e-9, fidelity: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub family: ScheduleFamily,
    pub n_samples: usize,
    pub max_invariance_residual: f64,
    pub max_main_residual: f64,
    pub min_fidelity: f64,
    pub tolerance: VerifyTolerance,
    pub residuals_passed: bool,
    pub fidelity_passed: bool,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.residuals_passed && self.fidelity_passed
    }
}

/// Constant in-phase schedule of level `d` on a carrier detuned by `Δ`.
pub fn detuned_constant_schedule(cfg: &DriveConfig, n_samples: usize, d: f64) -> Result<PulseSchedule> {
    Ok(PulseSchedule::new(
        cfg.dt(),
        vec![d; n_samples],
        cfg.drive_freq(),
        PHASE_X,
        format!("constant/n={n_samples}/d={d}/delta={:e}", cfg.detuning()),
    )?
    .with_origin(crate::drive::ScheduleOrigin {
        family: ScheduleFamily::Constant,
        detuning: cfg.detuning(),
        omega_c: cfg.omega_c(),
        d_max: d,
    }))
}

/// Source protocol of `s` and the Hamiltonian its family claims keeps `N` invariant.
fn reconstruct(s: &PulseSchedule, base: &DriveConfig) -> Result<(ControlProtocol, NobieSolution)> {
    let origin = s.origin().ok_or_else(|| {
        Error::InvalidConfig("schedule carries no family metadata; cannot rebuild its protocol".into())
    })?;
    let cfg = base.with_detuning(origin.detuning).with_omega_c(origin.omega_c)?.with_dt(s.dt())?;
    let n = s.n_samples();
    match origin.family {
        ScheduleFamily::Nobie => {
            let p = ramp_protocol(&cfg, n, origin.d_max)?;
            let sol = independent_solution(&p, Axis::X)?;
            Ok((p, sol))
        }
        ScheduleFamily::Linear => {
            // the bare ramp applies H itself
            let p = ramp_protocol(&cfg, n, origin.d_max)?;
            let h = p.clone();
            let sol = NobieSolution::custom(&p, move |t| h.at(t));
            Ok((p, sol))
        }
        ScheduleFamily::Constant => {
            let r = PauliVector::new(-origin.d_max * cfg.omega_c(), 0.0, -0.5 * cfg.detuning());
            let p = ControlProtocol::constant(format!("constant(d={})", origin.d_max), r, n as f64 * cfg.dt())?;
            let sol = NobieSolution::custom(&p, move |_| r);
            Ok((p, sol))
        }
    }
}

/// Residuals of the reconstructed continuous solution over a dense scan, and
/// the instantaneous fidelity of the digitized schedule propagated from the
/// ground state of `N(0)`.
pub fn verify_schedule(s: &PulseSchedule, base: &DriveConfig, tol: VerifyTolerance) -> Result<VerifyReport> {
    let (p, sol) = reconstruct(s, base)?;
    let origin = *s.origin().expect("checked by reconstruct");
    let cfg = base.with_detuning(origin.detuning).with_omega_c(origin.omega_c)?;

    let (mut inv, mut main) = (0.0f64, 0.0f64);
    for t in p.scan_times(SCAN_POINTS) {
        let f = p.magnitude(t);
        inv = inv.max(invariance_residual(&p, &sol, t)? / f);
        let m = main_conditions_residual(&p, &sol, t)?;
        main = main.max(m.iter().map(|v| v.abs()).fold(0.0, f64::max) / (f * f));
    }

    let r0 = p.at(0.0);
    let start = eigensystem_with_scale(r0, 1.0)
        .map_err(|_| Error::DegenerateSpectrum { time: 0.0, magnitude: r0.magnitude() })?
        .v_minus;
    let traj = propagate(&schedule_trace(s, &cfg)?, start);
    let min_fidelity = instantaneous_fidelity(&traj, &p)?.into_iter().fold(1.0, f64::min);

    Ok(VerifyReport {
        family: origin.family,
        n_samples: s.n_samples(),
        max_invariance_residual: inv,
        max_main_residual: main,
        min_fidelity,
        tolerance: tol,
        residuals_passed: inv <= tol.residual && main <= tol.residual,
        fidelity_passed: 1.0 - min_fidelity <= tol.fidelity,
    })
}
