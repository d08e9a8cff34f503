use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("buffer is full (capacity {capacity})")]
    CapacityExceeded { capacity: usize },

    #[error("index {index} out of bounds for buffer of size {len}")]
    OutOfBounds { index: usize, len: usize },

    #[error("label set must contain at least one class")]
    EmptyLabelSet,

    #[error("buffer capacity must be positive")]
    ZeroCapacity,

    #[error("class counts are all zero")]
    EmptyCounts,

    #[error("no class has been observed in the stream")]
    NoClassesSeen,

    #[error("allocation power {0} is outside [0, 1]")]
    InvalidAllocationPower(f64),

    #[error("distribution length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("instance too large: {subsets} subsets exceed the enumeration limit of {limit}")]
    InstanceTooLarge { subsets: u128, limit: u128 },

    #[error("invalid oracle instance: {0}")]
    InvalidInstance(String),

    #[error("invalid stream spec: {0}")]
    InvalidSpec(String),

    #[error("invalid task permutation: {0}")]
    InvalidPermutation(String),

    #[error("class {0} does not occur in the dataset")]
    ClassAbsent(u32),

    #[error("dataset is empty")]
    EmptyDataset,

    #[error("trace is empty")]
    EmptyTrace,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unexpected field {field:?}")]
    UnknownField { line: usize, field: String },

    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Stream(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
