use thiserror::Error;

/// Errors raised by the numerical and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// The result is not representable (overflow).
    #[error("range error: {0}")]
    Range(String),
    /// The requested combination has no implemented closed form or predictor.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// A threshold rule produced a large-deviation condition outside the regime.
    #[error("out of regime at index {index}: ld_condition = {ld_condition}")]
    OutOfRegime { index: f64, ld_condition: f64 },
    /// The expected-work guard tripped.
    #[error("work limit exceeded: mean replication work {mean_work} > {limit}")]
    WorkLimit { mean_work: f64, limit: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn unsupported<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Unsupported(msg.into()))
}
