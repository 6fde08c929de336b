//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by estimation, simulation, and I/O.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("cause vector length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("suffix of length {len} exceeds the enumeration guard ({max})")]
    SuffixTooLong { len: usize, max: usize },

    #[error("cause values must be 0 or 1, got {value}")]
    NonBinaryBit { value: u8 },

    #[error("index {index} out of range for {what} of length {len}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        len: usize,
    },

    #[error("empty stratum: {key}")]
    EmptyStratum { key: String },

    #[error("positivity violation: zero frequency in cell {cell}")]
    Positivity { cell: String },

    #[error("quantile level {level} outside [0, 1]")]
    InvalidQuantile { level: f64 },

    #[error("evaluation point {y} lies outside the open support ({lo}, {hi})")]
    OutsideSupport { y: f64, lo: f64, hi: f64 },

    #[error("density estimate {value:.3e} at the mapped point is below {min:.0e}; variance unsupported here")]
    DensityTooSmall { value: f64, min: f64 },

    #[error("invalid model specification: {0}")]
    InvalidSpec(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("dataset error: {0}")]
    InvalidData(String),

    #[error("csv load error at row {row}, column {column}: {message}")]
    CsvLoad {
        row: usize,
        column: String,
        message: String,
    },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("event is empty (contradictory bounds)")]
    EmptyEvent,

    #[error("evidence probability {prob:.2e} below {min:.0e}; oracle unreliable")]
    UnreliableOracle { prob: f64, min: f64 },

    #[error("bootstrap unstable: {dropped} of {total} replicates dropped (limit 20%)")]
    UnstableBootstrap { dropped: usize, total: usize },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
