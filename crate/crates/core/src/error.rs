//! Error type shared across the library.

/// Errors produced by estimators, statistics, samplers and inference.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// The sample is too small for the requested operation.
    #[error("insufficient data: need at least {required} observations, got {actual}")]
    InsufficientData { required: usize, actual: usize },

    /// A scale estimate is zero, so scale-normalized statistics are undefined.
    #[error("degenerate sample: {0}")]
    DegenerateSample(&'static str),

    /// The simulation produced more degenerate replications than allowed.
    #[error("simulation integrity: {0}")]
    SimulationIntegrity(String),

    /// A quantile table does not match the sample or the request.
    #[error("table mismatch: {0}")]
    TableMismatch(String),

    /// Monte Carlo calibration was requested without a quantile table.
    #[error("monte carlo calibration requires a quantile table")]
    MissingTable,
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
