use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("operator error: {0}")]
    Operator(String),
    #[error("scale error: N = {scale} is not resolvable on a grid with max |xi| = {max_wavenumber}")]
    Scale { scale: u64, max_wavenumber: f64 },
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("blow-up detected at t = {time} (last valid time {last_valid_time}): {reason}")]
    BlowUp {
        time: f64,
        last_valid_time: f64,
        reason: String,
    },
    #[error("time {time} outside trajectory range [{start}, {end}]")]
    Range { time: f64, start: f64, end: f64 },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("empty trajectory")]
    EmptyTrajectory,
}

pub type Result<T> = std::result::Result<T, Error>;
