use thiserror::Error;

/// Errors raised by protocol synthesis, simulation and calibration.
#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate spectrum: f = {magnitude:e} rad/s at t = {time:e} s")]
    DegenerateSpectrum { time: f64, magnitude: f64 },

    #[error("invalid duration {0:e} s (must be positive and finite)")]
    InvalidDuration(f64),

    #[error("duration {duration:e} s is not an integer multiple of dt = {dt:e} s")]
    NonCommensurateDuration { duration: f64, dt: f64 },

    #[error("non-finite control value at t = {0:e} s")]
    NonFiniteControl(f64),

    #[error("singular control: divisor component vanishes at t = {time:e} s and the pole does not cancel")]
    SingularControl { time: f64 },

    #[error("amplitude {value} out of range [0, 1] at sample {index}")]
    AmplitudeOutOfRange { index: usize, value: f64 },

    #[error("unsupported pulse phase {0} rad (only 0 and pi/2 are modelled)")]
    UnsupportedPhase(f64),

    #[error("invalid amplitude {0} (must lie in (0, 1])")]
    InvalidAmplitude(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cosine fit diverged: {0}")]
    FitDiverged(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("schema violation at {path}: {reason}")]
    SchemaViolation { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn schema(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::SchemaViolation { path: path.into(), reason: reason.into() }
    }
}
