//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the analysis and simulation routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative solve did not converge.
    #[error("numeric error: {what} did not converge (residual {residual:e})")]
    Numeric { what: String, residual: f64 },

    /// The operation does not support the given spring configuration.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// A pose or screw geometry is infeasible.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// A design matrix is rank deficient.
    #[error("rank error: {0}")]
    Rank(String),

    /// A trace lacks a required event (e.g. ground contact).
    #[error("event missing: {0}")]
    EventMissing(String),

    /// Invalid or incomplete configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A CSV record could not be ingested.
    #[error("ingestion error at row {row}, column '{column}': {message}")]
    Ingest {
        row: u64,
        column: String,
        message: String,
    },

    /// A CSV file could not be ingested as a whole.
    #[error("ingestion error: {0}")]
    IngestFile(String),

    /// A tendon variant lacks a rotation or a compression record.
    #[error("incomplete variant: {0}")]
    IncompleteVariant(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_finite(name: &str, value: f64) -> Result<()> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite, got {value}")))
    }
}
