use crate::domain::TestId;

/// Errors across ingestion, scheduling, evaluation and experiment running.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("validation error: {0}")]
    Validation(String),

    #[error("test `{0}` is not in the schedule")]
    TestNotInSchedule(TestId),

    #[error("scheduled test `{0}` is missing from the cycle log")]
    UnknownTest(TestId),

    #[error("feature vector has length {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("repetitions cover mismatched cycle sets: {0}")]
    MismatchedCycles(String),

    #[error("APFD requires zero undetected failures and at least one detected failure")]
    ApfdUndefined,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("snapshot serialization: {0}")]
    Snapshot(#[from] serde_json::Error),

    #[error("CSV: {0}")]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
