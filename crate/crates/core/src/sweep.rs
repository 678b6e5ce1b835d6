//! Duration × detuning sweeps of ramp schedules, with their theory columns.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::drive::{
    generate_linear_schedule, generate_nobie_schedule, DriveConfig, PulseSchedule, ScheduleFamily, HARDWARE_GRANULARITY,
};
use crate::error::{Error, Result};
use crate::evolve::{
    adiabatic_discrimination, adiabatic_reference, evolve_final, ground_probability, hadamard_discriminate,
    schedule_trace,
};
use crate::io::{Provenance, ResultsFile};
use crate::measure::{run_experiment, Origin, RunRecord, ShotConfig};
use crate::pauli::QubitState;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub family: ScheduleFamily,
    pub taus: Vec<usize>,
    /// Full detunings `Δ`, rad/s.
    pub detunings: Vec<f64>,
    pub d_max: f64,
    /// Measure after a Hadamard instead of directly.
    pub discriminate: bool,
    pub hardware: bool,
    pub shots: ShotConfig,
    /// Worker threads; `None` uses the rayon default.
    pub workers: Option<usize>,
}

/// `from, from + step, ..., ≤ to`.
pub fn tau_range(from: usize, to: usize, step: usize) -> Result<Vec<usize>> {
    if from == 0 {
        return Err(Error::InvalidConfig("durations must be at least one sample".into()));
    }
    if to < from {
        return Err(Error::InvalidConfig(format!("empty duration range {from}..{to}")));
    }
    if step == 0 && to != from {
        return Err(Error::InvalidConfig("duration step must be positive".into()));
    }
    Ok((from..=to).step_by(step.max(1)).collect())
}

impl SweepSpec {
    pub fn validate(&self) -> Result<()> {
        if !matches!(self.family, ScheduleFamily::Nobie | ScheduleFamily::Linear) {
            return Err(Error::InvalidConfig(format!("cannot sweep the {} family", self.family)));
        }
        if self.taus.is_empty() || self.detunings.is_empty() {
            return Err(Error::InvalidConfig("sweep needs at least one duration and one detuning".into()));
        }
        if self.hardware {
            if let Some(t) = self.taus.iter().find(|t| !t.is_multiple_of(HARDWARE_GRANULARITY)) {
                return Err(Error::InvalidConfig(format!(
                    "hardware sweeps need multiples of {HARDWARE_GRANULARITY} samples, got {t}"
                )));
            }
        }
        if let Some(d) = self.detunings.iter().find(|d| !d.is_finite()) {
            return Err(Error::InvalidConfig(format!("detuning {d} is not finite")));
        }
        if !(0.0..=1.0).contains(&self.d_max) {
            return Err(Error::AmplitudeOutOfRange { index: 0, value: self.d_max });
        }
        if self.workers == Some(0) {
            return Err(Error::InvalidConfig("worker count must be positive".into()));
        }
        self.shots.validate()
    }

    /// Sweep keys in output order: detuning-major, durations as given.
    pub fn points(&self) -> Vec<(f64, usize)> {
        self.detunings.iter().flat_map(|&d| self.taus.iter().map(move |&t| (d, t))).collect()
    }

    pub fn schedule(&self, base: &DriveConfig, detuning: f64, tau_samples: usize) -> Result<PulseSchedule> {
        let cfg = base.with_detuning(detuning);
        let s = match self.family {
            ScheduleFamily::Nobie => generate_nobie_schedule(&cfg, tau_samples, self.d_max)?,
            _ => generate_linear_schedule(&cfg, tau_samples, self.d_max)?,
        };
        if self.hardware {
            s.hardware_bound()
        } else {
            Ok(s)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub tau_samples: usize,
    pub detuning: f64,
    /// `|⟨0|ψ(τ)⟩|²` of the simulated final state.
    pub exact_p0: f64,
    /// `|⟨0|h|ψ(τ)⟩|²` of the simulated final state.
    pub exact_discrimination: f64,
    pub adiabatic_p0: f64,
    pub adiabatic_discrimination: f64,
    pub record: RunRecord,
}

fn sweep_point(base: &DriveConfig, spec: &SweepSpec, detuning: f64, tau_samples: usize) -> Result<SweepPoint> {
    let cfg = base.with_detuning(detuning);
    let schedule = spec.schedule(base, detuning, tau_samples)?;
    let psi = evolve_final(&schedule_trace(&schedule, &cfg)?, QubitState::ground());
    let omega_max = spec.d_max * cfg.omega_c();
    Ok(SweepPoint {
        tau_samples,
        detuning,
        exact_p0: ground_probability(&psi),
        exact_discrimination: hadamard_discriminate(&psi),
        adiabatic_p0: adiabatic_reference(detuning, omega_max)?,
        adiabatic_discrimination: adiabatic_discrimination(detuning, omega_max)?,
        record: run_experiment(&schedule, &cfg, &spec.shots, spec.discriminate)?,
    })
}

/// Simulates every (detuning, duration) point. Points run concurrently on a
/// private pool; the result order is that of [`SweepSpec::points`].
pub fn run_sweep(base: &DriveConfig, spec: &SweepSpec) -> Result<Vec<SweepPoint>> {
    spec.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = spec.workers {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let keys = spec.points();
    pool.install(|| keys.par_iter().map(|&(d, t)| sweep_point(base, spec, d, t)).collect())
}

const CSV_COLUMNS: [(&str, &str); 13] = [
    ("family", "schedule family"),
    ("tau_samples", "duration in samples"),
    ("tau_s", "duration, s"),
    ("detuning_rad_s", "protocol detuning Delta, rad/s"),
    ("measurement", "ground: direct; hadamard: after a Hadamard gate"),
    ("repeat", "repeat index"),
    ("p0", "fraction of 0 outcomes in this repeat"),
    ("mean_p0", "mean of p0 over repeats"),
    ("exact_p0", "|<0|psi(tau)>|^2 of the simulated final state"),
    ("exact_discrimination", "|<0|h|psi(tau)>|^2 of the simulated final state"),
    ("adiabatic_p0", "|<0|ground(tau)>|^2 for the ramp endpoint"),
    ("adiabatic_discrimination", "|<0|h|ground(tau)>|^2 for the ramp endpoint"),
    ("seed", "RNG seed"),
];

/// One row per (detuning, duration, repeat) under a `#` comment block that
/// documents the run parameters and columns.
pub fn write_sweep_csv<W: Write>(
    points: &[SweepPoint],
    spec: &SweepSpec,
    base: &DriveConfig,
    mut out: W,
) -> Result<()> {
    writeln!(out, "# nobie sweep")?;
    writeln!(
        out,
        "# family={} d_max={} omega_c_rad_s={} dt_s={} shots={} repeats={} seed={}",
        spec.family,
        spec.d_max,
        base.omega_c(),
        base.dt(),
        spec.shots.shots,
        spec.shots.repeats,
        spec.shots.seed
    )?;
    writeln!(out, "# columns:")?;
    for (name, doc) in CSV_COLUMNS {
        writeln!(out, "#   {name}: {doc}")?;
    }
    let measurement = if spec.discriminate { "hadamard" } else { "ground" };
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_COLUMNS.map(|c| c.0))?;
    for p in points {
        for (j, v) in p.record.per_repeat_p0.iter().enumerate() {
            w.write_record([
                spec.family.to_string(),
                p.tau_samples.to_string(),
                (p.tau_samples as f64 * base.dt()).to_string(),
                p.detuning.to_string(),
                measurement.to_string(),
                j.to_string(),
                v.to_string(),
                p.record.mean_p0.to_string(),
                p.exact_p0.to_string(),
                p.exact_discrimination.to_string(),
                p.adiabatic_p0.to_string(),
                p.adiabatic_discrimination.to_string(),
                spec.shots.seed.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Records of a sweep as a simulated [`ResultsFile`].
pub fn sweep_results(points: &[SweepPoint], spec: &SweepSpec, timestamp: impl Into<String>) -> ResultsFile {
    ResultsFile::new(
        points.iter().map(|p| p.record.clone()).collect(),
        spec.shots,
        Provenance {
            origin: Origin::Simulated,
            seed: Some(spec.shots.seed),
            backend: None,
            timestamp: timestamp.into(),
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(family: ScheduleFamily) -> SweepSpec {
        SweepSpec {
            family,
            taus: tau_range(320, 352, 16).unwrap(),
            detunings: vec![1e8, 2e8],
            d_max: 0.5,
            discriminate: false,
            hardware: true,
            shots: ShotConfig { repeats: 3, ..ShotConfig::default() }.with_seed(4),
            workers: Some(2),
        }
    }

    #[test]
    fn ranges() {
        assert_eq!(tau_range(320, 624, 16).unwrap().len(), 20);
        assert_eq!(tau_range(320, 320, 16).unwrap(), vec![320]);
        assert_eq!(tau_range(320, 320, 0).unwrap(), vec![320]);
        assert!(tau_range(400, 320, 16).is_err());
        assert!(tau_range(0, 320, 16).is_err());
    }

    #[test]
    fn order_and_rows() {
        let s = spec(ScheduleFamily::Linear);
        let pts = run_sweep(&DriveConfig::default(), &s).unwrap();
        let keys: Vec<_> = pts.iter().map(|p| (p.detuning, p.tau_samples)).collect();
        assert_eq!(keys, s.points());
        let mut buf = Vec::new();
        write_sweep_csv(&pts, &s, &DriveConfig::default(), &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows = text.lines().filter(|l| !l.starts_with('#')).count();
        assert_eq!(rows, 1 + 2 * 3 * 3);
    }

    #[test]
    fn worker_count_does_not_change_output() {
        let mut a = spec(ScheduleFamily::Nobie);
        a.discriminate = true;
        let mut b = a.clone();
        b.workers = Some(1);
        let cfg = DriveConfig::default();
        let (pa, pb) = (run_sweep(&cfg, &a).unwrap(), run_sweep(&cfg, &b).unwrap());
        assert_eq!(pa, pb);
        for p in &pa {
            assert!((p.exact_p0 - p.adiabatic_p0).abs() < 1e-3);
        }
    }

    #[test]
    fn invalid_specs() {
        let cfg = DriveConfig::default();
        let mut s = spec(ScheduleFamily::Constant);
        assert!(run_sweep(&cfg, &s).is_err());
        s = spec(ScheduleFamily::Linear);
        s.taus = vec![330];
        assert!(run_sweep(&cfg, &s).is_err());
        s = spec(ScheduleFamily::Linear);
        s.d_max = 1.5;
        assert!(matches!(run_sweep(&cfg, &s), Err(Error::AmplitudeOutOfRange { .. })));
    }
}
