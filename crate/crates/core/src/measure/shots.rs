use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::drive::{DriveConfig, PulseSchedule};
use crate::error::{Error, Result};
use crate::evolve::{evolve_final, ground_probability, hadamard_discriminate, schedule_trace};
use crate::pauli::QubitState;

pub const DEFAULT_SHOTS: u32 = 1024;
pub const DEFAULT_REPEATS: u32 = 30;

/// Shot budget for one experiment: `repeats` estimates of `p0`, each from
/// `shots` projective measurements.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ShotConfig {
    pub shots: u32,
    pub repeats: u32,
    #[serde(default)]
    pub seed: u64,
    /// Mixes `p0` toward ½ before sampling, `p0 → (1 - p)·p0 + p/2`.
    #[serde(default)]
    pub depolarizing: f64,
}

impl Default for ShotConfig {
    fn default() -> Self {
        ShotConfig { shots: DEFAULT_SHOTS, repeats: DEFAULT_REPEATS, seed: 0, depolarizing: 0.0 }
    }
}

impl ShotConfig {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 || self.repeats == 0 {
            return Err(Error::InvalidConfig("shots and repeats must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&self.depolarizing) {
            return Err(Error::InvalidConfig(format!("depolarizing parameter {} outside [0, 1]", self.depolarizing)));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Simulated,
    Hardware,
}

impl Origin {
    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Simulated => "simulated",
            Origin::Hardware => "hardware",
        }
    }
}

/// Measured ground-state statistics of one drive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub family: String,
    pub duration_samples: usize,
    /// Detuning of the protocol the drive implements, rad/s.
    pub detuning_rad_s: f64,
    pub per_repeat_p0: Vec<f64>,
    pub mean_p0: f64,
    pub shots: u32,
    pub label: String,
    pub origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl RunRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        family: impl Into<String>,
        duration_samples: usize,
        detuning_rad_s: f64,
        per_repeat_p0: Vec<f64>,
        shots: u32,
        label: impl Into<String>,
        origin: Origin,
        seed: Option<u64>,
    ) -> Self {
        let mean_p0 = mean(&per_repeat_p0);
        RunRecord {
            family: family.into(),
            duration_samples,
            detuning_rad_s,
            per_repeat_p0,
            mean_p0,
            shots,
            label: label.into(),
            origin,
            seed,
        }
    }

    /// Sample standard deviation of the per-repeat estimates.
    pub fn spread(&self) -> f64 {
        let n = self.per_repeat_p0.len();
        if n < 2 {
            return 0.0;
        }
        let m = self.mean_p0;
        (self.per_repeat_p0.iter().map(|p| (p - m).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
    }
}

pub(crate) fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// 64-bit FNV-1a, used to key RNG streams by label.
fn stream_id(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Generator for the record `label` under `seed`. Distinct labels get
/// independent ChaCha streams, so records can be sampled in any order.
pub fn record_rng(seed: u64, label: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream_id(label));
    rng
}

/// Per-repeat fractions of `0` outcomes from Bernoulli(`p0`) shots.
pub fn sample_counts(p0: f64, cfg: &ShotConfig, label: &str) -> Result<Vec<f64>> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidConfig(format!("probability {p0} outside [0, 1]")));
    }
    let p = ((1.0 - cfg.depolarizing) * p0 + 0.5 * cfg.depolarizing).clamp(0.0, 1.0);
    let mut rng = record_rng(cfg.seed, label);
    Ok((0..cfg.repeats)
        .map(|_| {
            let zeros = (0..cfg.shots).filter(|_| rng.gen_bool(p)).count();
            zeros as f64 / f64::from(cfg.shots)
        })
        .collect())
}

/// Exact ground-state probability after playing `schedule` from `|0⟩`,
/// optionally followed by a Hadamard.
pub fn exact_p0(schedule: &PulseSchedule, cfg: &DriveConfig, discriminate: bool) -> Result<f64> {
    let psi = evolve_final(&schedule_trace(schedule, cfg)?, QubitState::ground());
    let p = if discriminate { hadamard_discriminate(&psi) } else { ground_probability(&psi) };
    Ok(p.clamp(0.0, 1.0))
}

/// Simulates one experiment: propagate, optionally discriminate, then sample shots.
pub fn run_experiment(
    schedule: &PulseSchedule,
    cfg: &DriveConfig,
    shot_cfg: &ShotConfig,
    discriminate: bool,
) -> Result<RunRecord> {
    let p0 = exact_p0(schedule, cfg, discriminate)?;
    let label = if discriminate { format!("{}/h", schedule.label()) } else { schedule.label().to_string() };
    let per_repeat = sample_counts(p0, shot_cfg, &label)?;
    let (family, detuning) = match schedule.origin() {
        Some(o) => (o.family.as_str().to_string(), o.detuning),
        None => ("custom".to_string(), cfg.qubit_freq() - schedule.frequency()),
    };
    Ok(RunRecord::new(
        family,
        schedule.n_samples(),
        detuning,
        per_repeat,
        shot_cfg.shots,
        label,
        Origin::Simulated,
        Some(shot_cfg.seed),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drive::generate_linear_schedule;

    #[test]
    fn degenerate_probabilities() {
        let cfg = ShotConfig::default().with_seed(7);
        assert!(sample_counts(1.0, &cfg, "a").unwrap().iter().all(|&p| p == 1.0));
        assert!(sample_counts(0.0, &cfg, "a").unwrap().iter().all(|&p| p == 0.0));
    }

    #[test]
    fn repeats_are_multiples_of_one_over_shots() {
        let cfg = ShotConfig::default().with_seed(3);
        let v = sample_counts(0.37, &cfg, "x").unwrap();
        assert_eq!(v.len(), 30);
        for p in v {
            let k = p * 1024.0;
            assert_eq!(k, k.round());
        }
    }

    #[test]
    fn reproducible_and_label_keyed() {
        let cfg = ShotConfig::default().with_seed(11);
        let a = sample_counts(0.6749, &cfg, "nobie/tau=320").unwrap();
        let b = sample_counts(0.6749, &cfg, "nobie/tau=320").unwrap();
        let c = sample_counts(0.6749, &cfg, "nobie/tau=336").unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
        // 3 binomial standard errors of the 30 720-shot mean
        let se = (0.6749f64 * 0.3251 / (1024.0 * 30.0)).sqrt();
        assert!((mean(&a) - 0.6749).abs() < 3.0 * se);
        assert!((3.0 * se - 0.0080).abs() < 2e-4);
    }

    #[test]
    fn depolarizing_pulls_toward_half() {
        let cfg = ShotConfig { depolarizing: 1.0, ..ShotConfig::default() };
        let m = mean(&sample_counts(1.0, &cfg, "d").unwrap());
        assert!((m - 0.5).abs() < 0.02);
    }

    #[test]
    fn invalid_shot_config() {
        let cfg = ShotConfig { shots: 0, ..ShotConfig::default() };
        assert!(sample_counts(0.5, &cfg, "x").is_err());
        assert!(sample_counts(1.5, &ShotConfig::default(), "x").is_err());
    }

    #[test]
    fn zero_schedule_experiment() {
        let cfg = DriveConfig::default();
        let s = generate_linear_schedule(&cfg, 320, 0.0).unwrap();
        let rec = run_experiment(&s, &cfg, &ShotConfig::default(), false).unwrap();
        assert!(rec.per_repeat_p0.iter().all(|&p| p == 1.0));
        assert_eq!(rec.mean_p0, 1.0);
        assert_eq!(rec.origin, Origin::Simulated);
        assert_eq!(rec.family, "linear");
    }

    #[test]
    fn experiment_is_deterministic() {
        let cfg = DriveConfig::default();
        let s = generate_linear_schedule(&cfg, 320, 0.5).unwrap();
        let shots = ShotConfig::default().with_seed(99);
        assert_eq!(run_experiment(&s, &cfg, &shots, true).unwrap(), run_experiment(&s, &cfg, &shots, true).unwrap());
    }
}
