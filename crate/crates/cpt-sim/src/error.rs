use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An input that is formally valid but makes the requested construction
    /// collapse (e.g. a dark-state leg with zero coupling amplitude).
    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    /// Division by a vanishing one-photon detuning.
    #[error("singular detuning: {0}")]
    SingularDetuning(String),

    /// The Liouvillian kernel is not one-dimensional, so no unique steady
    /// state exists. Typically the ground relaxation rate is zero.
    #[error("no unique steady state: {0}")]
    NonUniqueSteadyState(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("scan aborted at raman detuning {delta_hz} Hz: {source}")]
    ScanFailed {
        delta_hz: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
