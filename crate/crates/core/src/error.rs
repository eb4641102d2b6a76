use thiserror::Error;

/// Errors raised by the numerical routines.
///
/// Variants are grouped by the CLI exit code they map to: configuration
/// problems (2), numerical guards (3) and internal invariant violations (4).
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("size mismatch: expected {expected} values, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value {value} at node {node:?}")]
    NonFinite { node: Vec<f64>, value: f64 },

    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },

    #[error("ratio undefined: denominator {0:e} below 1e-14")]
    UndefinedRatio(f64),

    #[error("point within {0:e} of an excluded point")]
    NearSingularPoint(f64),

    #[error("ball of radius {radius} around {center:?} does not fit the computational domain")]
    BallOutsideDomain { center: Vec<f64>, radius: f64 },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("field is identically zero")]
    IdenticallyZero,

    #[error("invalid heights: {0}")]
    InvalidHeights(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidGrid(_)
            | Error::InvalidArgument(_)
            | Error::AxisOutOfRange { .. }
            | Error::InvalidHeights(_)
            | Error::BallOutsideDomain { .. }
            | Error::Config(_)
            | Error::Io(_) => 2,
            Error::SizeMismatch { .. }
            | Error::GridMismatch
            | Error::NonFinite { .. }
            | Error::UndefinedRatio(_)
            | Error::NearSingularPoint(_)
            | Error::TooFewSamples { .. }
            | Error::IdenticallyZero => 3,
            Error::Invariant(_) => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
