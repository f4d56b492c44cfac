use thiserror::Error;

use crate::schedule::ScheduleViolation;

/// Contract violations and I/O failures raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty sampling range [{lo}, {hi}]")]
    InvalidRange { lo: i64, hi: i64 },

    #[error("index {index} out of bounds for array of length {len}")]
    IndexOutOfBounds { index: usize, len: usize },

    #[error("compare-exchange needs two distinct indices, got {0} twice")]
    SameIndex(usize),

    #[error("operation needs at least {min} elements, got {len}")]
    TooShort { len: usize, min: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(ScheduleViolation),

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("{wires} wires exceeds the exhaustive verification cap of {cap}")]
    WireCapExceeded { wires: usize, cap: usize },

    #[error("check-sorted termination is data dependent and has no fixed trace")]
    DataDependentMode,

    #[error("key {key} at position {position} is not 0 or 1")]
    NotZeroOne { position: usize, key: i64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
