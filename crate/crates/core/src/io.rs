//! JSON file formats for schedules and measurement results, and the CSV view
//! of result records.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::drive::{PulseSchedule, ScheduleFamily, ScheduleOrigin, HARDWARE_GRANULARITY};
use crate::error::{Error, Result};
use crate::measure::{Origin, RunRecord, ShotConfig};

pub const FORMAT_VERSION: u32 = 1;

/// Tolerance for `p0·shots` being an integer and for stored means.
const COUNT_TOLERANCE: f64 = 1e-9;
const MEAN_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleMetadata {
    /// Detuning `Δ` of the underlying protocol, rad/s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detuning_rad_s: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_c_rad_s: Option<f64>,
    pub tau_samples: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<ScheduleFamily>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_max: Option<f64>,
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
}

/// Wire form of a [`PulseSchedule`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub format_version: u32,
    pub dt_s: f64,
    pub frequency_rad_s: f64,
    pub phase_rad: f64,
    pub amplitudes: Vec<f64>,
    pub n_samples: usize,
    pub hardware_bound: bool,
    pub metadata: ScheduleMetadata,
}

impl ScheduleFile {
    pub fn from_schedule(s: &PulseSchedule, created: Option<String>) -> Self {
        let origin = s.origin();
        ScheduleFile {
            format_version: FORMAT_VERSION,
            dt_s: s.dt(),
            frequency_rad_s: s.frequency(),
            phase_rad: s.phase(),
            amplitudes: s.amplitudes().to_vec(),
            n_samples: s.n_samples(),
            hardware_bound: s.is_hardware_bound(),
            metadata: ScheduleMetadata {
                detuning_rad_s: origin.map(|o| o.detuning),
                omega_c_rad_s: origin.map(|o| o.omega_c),
                tau_samples: s.n_samples(),
                family: origin.map(|o| o.family),
                d_max: origin.map(|o| o.d_max),
                label: s.label().to_string(),
                created,
            },
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::schema(
                "format_version",
                format!("expected {FORMAT_VERSION}, found {}", self.format_version),
            ));
        }
        if !(self.dt_s > 0.0 && self.dt_s.is_finite()) {
            return Err(Error::schema("dt_s", format!("must be positive, found {}", self.dt_s)));
        }
        if !self.frequency_rad_s.is_finite() {
            return Err(Error::schema("frequency_rad_s", "must be finite"));
        }
        if self.n_samples != self.amplitudes.len() {
            return Err(Error::schema(
                "n_samples",
                format!("{} declared but {} amplitudes present", self.n_samples, self.amplitudes.len()),
            ));
        }
        if self.amplitudes.is_empty() {
            return Err(Error::schema("amplitudes", "empty"));
        }
        if let Some((i, a)) = self.amplitudes.iter().enumerate().find(|(_, a)| !(0.0..=1.0).contains(*a)) {
            return Err(Error::schema(format!("amplitudes[{i}]"), format!("{a} outside [0, 1]")));
        }
        if self.hardware_bound && !self.n_samples.is_multiple_of(HARDWARE_GRANULARITY) {
            return Err(Error::schema(
                "n_samples",
                format!("hardware-bound schedules need a multiple of {HARDWARE_GRANULARITY}, found {}", self.n_samples),
            ));
        }
        let m = &self.metadata;
        if m.tau_samples != self.n_samples {
            return Err(Error::schema("metadata.tau_samples", "differs from n_samples"));
        }
        let present = [m.detuning_rad_s.is_some(), m.omega_c_rad_s.is_some(), m.family.is_some(), m.d_max.is_some()];
        if present.iter().any(|p| *p) && !present.iter().all(|p| *p) {
            return Err(Error::schema(
                "metadata",
                "family, detuning_rad_s, omega_c_rad_s and d_max must be given together",
            ));
        }
        Ok(())
    }

    pub fn to_schedule(&self) -> Result<PulseSchedule> {
        self.validate()?;
        let m = &self.metadata;
        let mut s = PulseSchedule::new(
            self.dt_s,
            self.amplitudes.clone(),
            self.frequency_rad_s,
            self.phase_rad,
            m.label.clone(),
        )?;
        if let (Some(family), Some(detuning), Some(omega_c), Some(d_max)) =
            (m.family, m.detuning_rad_s, m.omega_c_rad_s, m.d_max)
        {
            s = s.with_origin(ScheduleOrigin { family, detuning, omega_c, d_max });
        }
        if self.hardware_bound {
            s = s.hardware_bound()?;
        }
        Ok(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub origin: Origin,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub backend: Option<String>,
    pub timestamp: String,
}

/// Measurement records with the shot budget they were taken under.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultsFile {
    pub format_version: u32,
    pub runs: Vec<RunRecord>,
    pub shot_config: ShotConfig,
    pub provenance: Provenance,
}

impl ResultsFile {
    pub fn new(runs: Vec<RunRecord>, shot_config: ShotConfig, provenance: Provenance) -> Self {
        ResultsFile { format_version: FORMAT_VERSION, runs, shot_config, provenance }
    }

    pub fn validate(&self) -> Result<()> {
        if self.format_version != FORMAT_VERSION {
            return Err(Error::schema(
                "format_version",
                format!("expected {FORMAT_VERSION}, found {}", self.format_version),
            ));
        }
        let cfg = &self.shot_config;
        if cfg.shots == 0 || cfg.repeats == 0 {
            return Err(Error::schema("shot_config", "shots and repeats must be at least 1"));
        }
        if self.provenance.seed.is_none() && self.provenance.backend.is_none() {
            return Err(Error::schema("provenance", "needs a seed or a backend name"));
        }
        let shots = f64::from(cfg.shots);
        for (i, run) in self.runs.iter().enumerate() {
            if run.shots != cfg.shots {
                return Err(Error::schema(
                    format!("runs[{i}].shots"),
                    format!("{} differs from shot_config.shots = {}", run.shots, cfg.shots),
                ));
            }
            if run.per_repeat_p0.len() != cfg.repeats as usize {
                return Err(Error::schema(
                    format!("runs[{i}].per_repeat_p0"),
                    format!("{} repeats, shot_config declares {}", run.per_repeat_p0.len(), cfg.repeats),
                ));
            }
            for (j, &p) in run.per_repeat_p0.iter().enumerate() {
                let count = p * shots;
                if !(0.0..=1.0).contains(&p) || (count - count.round()).abs() > COUNT_TOLERANCE {
                    return Err(Error::schema(
                        format!("runs[{i}].per_repeat_p0[{j}]"),
                        format!("{p} is not a count over {} shots", cfg.shots),
                    ));
                }
            }
            let mean = run.per_repeat_p0.iter().sum::<f64>() / run.per_repeat_p0.len() as f64;
            if (run.mean_p0 - mean).abs() > MEAN_TOLERANCE {
                return Err(Error::schema(
                    format!("runs[{i}].mean_p0"),
                    format!("{} differs from the repeat mean {mean}", run.mean_p0),
                ));
            }
        }
        Ok(())
    }

    /// Joins the records of `other` into `self`.
    ///
    /// Records are keyed by (family, duration, detuning, origin); an incoming
    /// record replaces an existing one with the same key. The result is
    /// ordered by key. Both files must share shots and repeats.
    pub fn merge(mut self, other: ResultsFile) -> Result<ResultsFile> {
        other.validate()?;
        if other.shot_config.shots != self.shot_config.shots || other.shot_config.repeats != self.shot_config.repeats {
            return Err(Error::schema(
                "shot_config",
                format!(
                    "{}x{} cannot merge with {}x{}",
                    other.shot_config.shots,
                    other.shot_config.repeats,
                    self.shot_config.shots,
                    self.shot_config.repeats
                ),
            ));
        }
        let mut keyed: BTreeMap<RecordKey, RunRecord> = BTreeMap::new();
        for run in self.runs.drain(..).chain(other.runs) {
            keyed.insert(RecordKey::of(&run), run);
        }
        self.runs = keyed.into_values().collect();
        Ok(self)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct RecordKey {
    family: String,
    duration_samples: usize,
    detuning_bits: i64,
    origin: u8,
}

impl RecordKey {
    fn of(run: &RunRecord) -> Self {
        // order-preserving integer image of the detuning
        let bits = run.detuning_rad_s.to_bits() as i64;
        let detuning_bits = bits ^ (((bits >> 63) as u64) >> 1) as i64;
        RecordKey {
            family: run.family.clone(),
            duration_samples: run.duration_samples,
            detuning_bits,
            origin: match run.origin {
                Origin::Simulated => 0,
                Origin::Hardware => 1,
            },
        }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| Error::schema(path.display().to_string(), e.to_string()))
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

pub fn read_schedule(path: &Path) -> Result<ScheduleFile> {
    let file: ScheduleFile = read_json(path)?;
    file.validate()?;
    Ok(file)
}

pub fn write_schedule(path: &Path, file: &ScheduleFile) -> Result<()> {
    file.validate()?;
    write_json(path, file)
}

pub fn read_results(path: &Path) -> Result<ResultsFile> {
    let file: ResultsFile = read_json(path)?;
    file.validate()?;
    Ok(file)
}

pub fn write_results(path: &Path, file: &ResultsFile) -> Result<()> {
    file.validate()?;
    write_json(path, file)
}

/// One row per (record, repeat): `family, tau_samples, detuning_rad_s, origin,
/// label, repeat, p0, mean_p0, shots`.
pub fn write_records_csv<W: Write>(runs: &[RunRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["family", "tau_samples", "detuning_rad_s", "origin", "label", "repeat", "p0", "mean_p0", "shots"])?;
    for run in runs {
        for (j, p) in run.per_repeat_p0.iter().enumerate() {
            w.write_record([
                run.family.clone(),
                run.duration_samples.to_string(),
                run.detuning_rad_s.to_string(),
                run.origin.as_str().to_string(),
                run.label.clone(),
                j.to_string(),
                p.to_string(),
                run.mean_p0.to_string(),
                run.shots.to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
