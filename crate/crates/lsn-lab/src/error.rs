use thiserror::Error;

/// Errors surfaced by samplers, decoders and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("guard exceeded for {what}: requested {requested}, limit {limit}")]
    GuardExceeded {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("generators are not independent")]
    DependentGenerators,

    #[error("generators do not pairwise commute")]
    NonCommutingGenerators,

    #[error("ensemble weights sum to {0}, expected 1")]
    WeightSum(f64),

    #[error("operand is not positive semidefinite (eigenvalue {0})")]
    NotPositive(f64),

    #[error("instance payload is not in {0} form")]
    WrongForm(&'static str),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: config errors map to 2, guard
    /// violations to 3, anything else to 1.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::GuardExceeded { .. } => 3,
            Error::InvalidParameter(_)
            | Error::Parse { .. }
            | Error::Json(_)
            | Error::DimensionMismatch { .. } => 2,
            _ => 1,
        }
    }
}
