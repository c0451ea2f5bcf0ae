use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A configuration cannot be used (e.g. a non positive-definite block).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The method does not support the requested setting.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// The null-proportion estimate has no surviving features.
    #[error("undefined estimate: no feature survives the filter at t = {t}")]
    UndefinedEstimate { t: f64 },

    /// Malformed tabular input, with 1-based row/column where known.
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("input/output error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
