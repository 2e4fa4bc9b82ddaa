use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("singular lattice (|det| = {det:e})")]
    SingularLattice { det: f64 },

    #[error("lattice vectors are too close to parallel ({angle_deg:.2} degrees)")]
    LatticeAngle { angle_deg: f64 },

    #[error("triangle sides a = {a}, b = {b} do not meet a unit base: {reason}")]
    NoTriangle { a: f64, b: f64, reason: &'static str },

    #[error("loss variant mismatch: {0}")]
    VariantMismatch(String),

    #[error("non-finite value at step {step}: {what}")]
    NonFinite { step: usize, what: String },

    #[error("no periodicity found: {0}")]
    NoPeriodicityFound(String),

    #[error("checkpoint format version {0} is not supported")]
    UnsupportedVersion(u32),

    #[error("corrupt file {path}: {reason}")]
    Corrupt { path: PathBuf, reason: String },

    #[error("shape inconsistency: {0}")]
    Shape(String),

    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("png encoding failed: {0}")]
    Png(#[from] png::EncodingError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
