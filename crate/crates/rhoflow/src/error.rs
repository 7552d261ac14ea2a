//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors produced by the library.
///
/// The CLI maps variants onto exit-code categories: data errors
/// ([`Error::Parse`], [`Error::Schema`], [`Error::DegenerateData`]),
/// numeric errors ([`Error::Domain`], [`Error::DegenerateCorrelation`],
/// [`Error::NonFinite`], [`Error::Grid`]) and I/O errors.
#[derive(Debug, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A correlation of exactly +/-1 was passed to a density operation.
    #[error("degenerate correlation: |rho| = 1 is not admissible here")]
    DegenerateCorrelation,

    /// The data cannot support the requested computation (constant column,
    /// empty treatment arm, empty dataset, ...).
    #[error("degenerate data: {0}")]
    DegenerateData(String),

    /// A computation produced a non-finite value (training divergence,
    /// underflowing flow derivative, ...).
    #[error("non-finite value: {0}")]
    NonFinite(String),

    /// The dataset violates its declared schema.
    #[error("schema violation: {0}")]
    Schema(String),

    /// A file could not be parsed.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    /// A grid-point computation failed; carries the offending `rho`.
    #[error("at grid point rho = {rho}: {source}")]
    Grid {
        rho: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn at_grid_point(rho: f64, source: Error) -> Self {
        Error::Grid {
            rho,
            source: Box::new(source),
        }
    }
}
