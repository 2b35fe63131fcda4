use thiserror::Error;

/// Errors raised by matrix construction, reduction, density evaluation and
/// sampling.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    /// The requested density is outside the range where a closed form is known.
    #[error("unsupported range: {0}")]
    UnsupportedRange(String),
    /// Integer argument outside the supported factorization range.
    #[error("out of supported range: {0}")]
    Range(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
