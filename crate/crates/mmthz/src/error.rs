//! Crate-wide error type.
//!
//! Errors are grouped by how a caller should react: `Domain` and
//! `Extrapolation` mean the inputs left the physics' validity range,
//! `Config` means a scenario or table file is malformed, `Numerical`
//! means an internal algorithm failed to converge.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Requested point lies outside a data table; tables are never
    /// silently extrapolated.
    #[error("extrapolation error: {0}")]
    Extrapolation(String),

    /// Frequency regime for which no tabulated data exists.
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    /// Malformed configuration, table file, or parameter combination.
    #[error("configuration error: {0}")]
    Config(String),

    /// A numerical routine failed to reach its tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),

    /// Feature hook present in the API but intentionally not implemented.
    #[error("unsupported feature: {0}")]
    Unsupported(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Short machine-readable kind tag, used by the CLI error objects.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Extrapolation(_) => "extrapolation",
            Error::UnsupportedRegime(_) => "unsupported_regime",
            Error::Config(_) => "config",
            Error::Numerical(_) => "numerical",
            Error::Unsupported(_) => "unsupported",
            Error::Io(_) => "io",
        }
    }
}
