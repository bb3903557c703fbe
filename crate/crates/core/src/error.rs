use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input must be positive")]
    Zero,

    #[error("{value} exceeds the supported range (max {max})")]
    OutOfRange { value: u128, max: u128 },

    #[error("{what}: {value} exceeds the configured cap {cap}")]
    CapExceeded {
        what: &'static str,
        value: u128,
        cap: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid form: {0}")]
    InvalidForm(String),

    #[error("no decomposition found for n = {n}: {trace}")]
    Counterexample { n: u64, trace: String },

    #[error("corrupt checkpoint {path}: {reason}")]
    CorruptCheckpoint { path: String, reason: String },

    #[error("checkpoint {path} was written for a different configuration")]
    CheckpointMismatch { path: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
