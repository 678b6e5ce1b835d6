use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::SystemTime;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nobie_core::drive::{
    generate_linear_schedule, generate_nobie_schedule, DEFAULT_DETUNING, DEFAULT_DT, DEFAULT_OMEGA_C,
    DEFAULT_QUBIT_FREQ,
};
use nobie_core::io::{read_results, read_schedule, write_records_csv, write_results, write_schedule, ScheduleFile};
use nobie_core::measure::{calibrate, DurationGrid, ShotConfig, DEFAULT_REPEATS, DEFAULT_SHOTS};
use nobie_core::sweep::{run_sweep, sweep_results, tau_range, write_sweep_csv, SweepSpec};
use nobie_core::verify::{detuned_constant_schedule, verify_schedule, VerifyTolerance};
use nobie_core::{DriveConfig, Error, PulseSchedule, ScheduleFamily};

/// NOBIE shortcuts to adiabaticity for a driven qubit: schedule synthesis,
/// simulated sweeps, Rabi calibration and invariance checks.
#[derive(Parser)]
#[command(name = "nobie", version)]
struct Cli {
    /// Seed for every simulated measurement.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Sample duration in seconds.
    #[arg(long, global = true, default_value_t = DEFAULT_DT)]
    dt: f64,
    /// Drive strength Ω_c at unit amplitude, rad/s.
    #[arg(long = "omega-c", global = true, default_value_t = DEFAULT_OMEGA_C)]
    omega_c: f64,
    /// Qubit frequency, rad/s.
    #[arg(long = "qubit-freq", global = true, default_value_t = DEFAULT_QUBIT_FREQ)]
    qubit_freq: f64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a pulse schedule and write it as JSON.
    Synth(SynthArgs),
    /// Simulate a duration × detuning sweep and write CSV rows.
    Sweep(SweepArgs),
    /// Run the Rabi calibration pipeline on simulated data.
    Calibrate(CalibrateArgs),
    /// Check invariance residuals and adiabatic fidelity of a schedule.
    Verify(VerifyArgs),
    /// Validate a results file and merge it with simulated records.
    Ingest(IngestArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum RampFamily {
    Nobie,
    Linear,
}

impl From<RampFamily> for ScheduleFamily {
    fn from(f: RampFamily) -> Self {
        match f {
            RampFamily::Nobie => ScheduleFamily::Nobie,
            RampFamily::Linear => ScheduleFamily::Linear,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum VerifyFamily {
    Nobie,
    Linear,
    Constant,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(value_enum)]
    family: RampFamily,
    #[arg(long = "tau-samples")]
    tau_samples: usize,
    /// Detuning Δ of the ramp protocol, rad/s.
    #[arg(long, default_value_t = DEFAULT_DETUNING, allow_hyphen_values = true)]
    detuning: f64,
    /// Ramp endpoint as a fraction of Ω_c.
    #[arg(long = "d-max", default_value_t = 0.5, allow_hyphen_values = true)]
    d_max: f64,
    /// Require a multiple of 16 samples.
    #[arg(long)]
    hardware: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(value_enum)]
    family: RampFamily,
    #[arg(long = "tau-from", default_value_t = 320)]
    tau_from: usize,
    #[arg(long = "tau-to", default_value_t = 624)]
    tau_to: usize,
    #[arg(long = "tau-step", default_value_t = 16)]
    tau_step: usize,
    /// Comma-separated detunings Δ, rad/s.
    #[arg(long, value_delimiter = ',', default_values_t = [1e8, 2e8, 4e8], allow_hyphen_values = true)]
    detunings: Vec<f64>,
    #[arg(long = "d-max", default_value_t = 0.5, allow_hyphen_values = true)]
    d_max: f64,
    /// Apply a Hadamard gate before measuring.
    #[arg(long)]
    discriminate: bool,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u32,
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    repeats: u32,
    /// Worker threads (default: one per core).
    #[arg(long)]
    workers: Option<usize>,
    /// Require every duration to be a multiple of 16 samples.
    #[arg(long)]
    hardware: bool,
    /// CSV destination; standard output when absent.
    #[arg(long = "out-csv")]
    out_csv: Option<PathBuf>,
    /// Also write the records as a results JSON file.
    #[arg(long = "out-results")]
    out_results: Option<PathBuf>,
}

#[derive(Args)]
struct CalibrateArgs {
    /// Comma-separated drive levels in (0, 1].
    #[arg(long = "d-values", value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5], allow_hyphen_values = true)]
    d_values: Vec<f64>,
    /// Pulse durations as start:step:count in samples.
    #[arg(long = "duration-grid", default_value = "16:16:64", value_parser = parse_grid)]
    duration_grid: DurationGrid,
    /// Drive strength the simulated device really has (default: --omega-c).
    #[arg(long = "omega-c-true")]
    omega_c_true: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SHOTS)]
    shots: u32,
    #[arg(long, default_value_t = DEFAULT_REPEATS)]
    repeats: u32,
    /// JSON report destination.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Schedule JSON to check.
    #[arg(long, conflicts_with = "family")]
    schedule: Option<PathBuf>,
    /// Build the schedule from parameters instead of a file.
    #[arg(long, value_enum, required_unless_present = "schedule")]
    family: Option<VerifyFamily>,
    #[arg(long = "tau-samples", default_value_t = 320)]
    tau_samples: usize,
    #[arg(long, default_value_t = DEFAULT_DETUNING, allow_hyphen_values = true)]
    detuning: f64,
    /// Ramp endpoint, or the level of a constant schedule.
    #[arg(long = "d-max", default_value_t = 0.5, allow_hyphen_values = true)]
    d_max: f64,
    /// Bound on the relative invariance and main-condition residuals.
    #[arg(long, default_value_t = 1e-9)]
    tolerance: f64,
    /// Bound on 1 - min instantaneous fidelity.
    #[arg(long = "fidelity-tolerance", default_value_t = 1e-3)]
    fidelity_tolerance: f64,
}

#[derive(Args)]
struct IngestArgs {
    /// Results JSON to validate and ingest.
    #[arg(long)]
    results: PathBuf,
    /// Results JSON to merge the ingested records into.
    #[arg(long = "merge-with")]
    merge_with: Option<PathBuf>,
    /// Merged results JSON destination.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Merged CSV destination; standard output when absent.
    #[arg(long = "out-csv")]
    out_csv: Option<PathBuf>,
}

fn parse_grid(s: &str) -> Result<DurationGrid, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [start, step, count] = parts.as_slice() else {
        return Err(format!("expected start:step:count, got `{s}`"));
    };
    let num = |v: &str| v.trim().parse::<usize>().map_err(|e| format!("`{v}`: {e}"));
    Ok(DurationGrid { start_samples: num(start)?, step_samples: num(step)?, count: num(count)? })
}

/// A command failure and its exit status.
enum Failure {
    Tolerance(String),
    Invalid(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Invalid(e.to_string())
    }
}

type Outcome = Result<(), Failure>;

fn timestamp() -> String {
    humantime::format_rfc3339_seconds(SystemTime::now()).to_string()
}

fn drive_config(cli: &Cli) -> Result<DriveConfig, Error> {
    DriveConfig::default().with_qubit_freq(cli.qubit_freq).with_omega_c(cli.omega_c)?.with_dt(cli.dt)
}

fn shot_config(shots: u32, repeats: u32, seed: u64) -> Result<ShotConfig, Error> {
    let cfg = ShotConfig { shots, repeats, seed, depolarizing: 0.0 };
    cfg.validate()?;
    Ok(cfg)
}

fn open_output(path: Option<&Path>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn ramp_schedule(
    cfg: &DriveConfig,
    family: ScheduleFamily,
    tau_samples: usize,
    d_max: f64,
    hardware: bool,
) -> Result<PulseSchedule, Error> {
    let s = match family {
        ScheduleFamily::Nobie => generate_nobie_schedule(cfg, tau_samples, d_max)?,
        _ => generate_linear_schedule(cfg, tau_samples, d_max)?,
    };
    if hardware {
        s.hardware_bound()
    } else {
        Ok(s)
    }
}

fn synth(cli: &Cli, args: &SynthArgs) -> Outcome {
    let cfg = drive_config(cli)?.with_detuning(args.detuning);
    let s = ramp_schedule(&cfg, args.family.into(), args.tau_samples, args.d_max, args.hardware)?;
    let file = ScheduleFile::from_schedule(&s, Some(timestamp()));
    if let Some(path) = &args.out {
        write_schedule(path, &file)?;
    }
    let amps = s.amplitudes();
    println!("n_samples {}", s.n_samples());
    println!("first {}", amps[0]);
    println!("last {}", amps[amps.len() - 1]);
    if let Some(path) = &args.out {
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn sweep(cli: &Cli, args: &SweepArgs) -> Outcome {
    let cfg = drive_config(cli)?;
    let spec = SweepSpec {
        family: args.family.into(),
        taus: tau_range(args.tau_from, args.tau_to, args.tau_step)?,
        detunings: args.detunings.clone(),
        d_max: args.d_max,
        discriminate: args.discriminate,
        hardware: args.hardware,
        shots: shot_config(args.shots, args.repeats, cli.seed)?,
        workers: args.workers,
    };
    let points = run_sweep(&cfg, &spec)?;
    let mut out = open_output(args.out_csv.as_deref())?;
    write_sweep_csv(&points, &spec, &cfg, &mut out)?;
    out.flush()?;
    if let Some(path) = &args.out_results {
        write_results(path, &sweep_results(&points, &spec, timestamp()))?;
    }
    eprintln!("{} sweep points, {} rows", points.len(), points.len() * spec.shots.repeats as usize);
    Ok(())
}

fn calibrate_cmd(cli: &Cli, args: &CalibrateArgs) -> Outcome {
    let truth = args.omega_c_true.unwrap_or(cli.omega_c);
    let cfg = drive_config(cli)?.with_omega_c(truth)?;
    let shots = shot_config(args.shots, args.repeats, cli.seed)?;
    let report = calibrate(&cfg, &args.d_values, &args.duration_grid, &shots)?;
    for p in &report.points {
        println!(
            "d {:<6} T {:.6e} s  Omega_c {:.6e} rad/s  rms {:.3e}",
            p.d, p.fit.period, p.omega_c, p.fit.residual_rms
        );
    }
    match &report.line {
        Some(l) => println!("line Omega_c(d) = {:.6e}·d + {:.6e}", l.slope, l.intercept),
        None => println!("single level: no line fit, using its Omega_c"),
    }
    println!(
        "selected Omega_c {:.6e} rad/s ({:+.4}% from {:.6e})",
        report.selected_omega_c,
        100.0 * (report.selected_omega_c / truth - 1.0),
        truth
    );
    if let Some(path) = &args.out {
        let json = serde_json::json!({
            "omega_c_true_rad_s": truth,
            "seed": cli.seed,
            "shot_config": shots,
            "duration_grid": args.duration_grid,
            "report": report,
        });
        std::fs::write(path, serde_json::to_string_pretty(&json).map_err(Error::from)? + "\n")?;
    }
    Ok(())
}

fn verify(cli: &Cli, args: &VerifyArgs) -> Outcome {
    let base = drive_config(cli)?;
    let schedule = match (&args.schedule, args.family) {
        (Some(path), _) => read_schedule(path)?.to_schedule()?,
        (None, Some(family)) => {
            let cfg = base.with_detuning(args.detuning);
            match family {
                VerifyFamily::Nobie => generate_nobie_schedule(&cfg, args.tau_samples, args.d_max)?,
                VerifyFamily::Linear => generate_linear_schedule(&cfg, args.tau_samples, args.d_max)?,
                VerifyFamily::Constant => detuned_constant_schedule(&cfg, args.tau_samples, args.d_max)?,
            }
        }
        (None, None) => return Err(Failure::Invalid("give --schedule or --family".into())),
    };
    let tol = VerifyTolerance { residual: args.tolerance, fidelity: args.fidelity_tolerance };
    let r = verify_schedule(&schedule, &base, tol)?;
    let mark = |ok: bool| if ok { "ok" } else { "FAIL" };
    println!("schedule {} ({} samples)", schedule.label(), r.n_samples);
    println!("max invariance residual / f   {:.3e}  [{}]", r.max_invariance_residual, mark(r.residuals_passed));
    println!("max main-condition residual / f^2 {:.3e}  [{}]", r.max_main_residual, mark(r.residuals_passed));
    println!("min instantaneous fidelity    {:.12}  [{}]", r.min_fidelity, mark(r.fidelity_passed));
    if r.passed() {
        Ok(())
    } else {
        Err(Failure::Tolerance("verification failed".into()))
    }
}

fn ingest(args: &IngestArgs) -> Outcome {
    let incoming = read_results(&args.results)?;
    let merged = match &args.merge_with {
        Some(path) => read_results(path)?.merge(incoming)?,
        None => incoming,
    };
    if let Some(path) = &args.out {
        write_results(path, &merged)?;
    }
    let mut out = open_output(args.out_csv.as_deref())?;
    write_records_csv(&merged.runs, &mut out)?;
    out.flush()?;
    eprintln!("{} records", merged.runs.len());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Synth(a) => synth(&cli, a),
        Command::Sweep(a) => sweep(&cli, a),
        Command::Calibrate(a) => calibrate_cmd(&cli, a),
        Command::Verify(a) => verify(&cli, a),
        Command::Ingest(a) => ingest(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Tolerance(msg)) => {
            eprintln!("nobie: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Invalid(msg)) => {
            eprintln!("nobie: error: {msg}");
            ExitCode::from(2)
        }
    }
}
