use thiserror::Error;

/// Errors raised by the analytical and simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("moment generating function diverges at theta={theta} (finite only below {abscissa}); approximate heavy tails with a fitted hyperexponential")]
    MgfDiverges { theta: f64, abscissa: f64 },

    #[error("wrong variant: {0}")]
    WrongVariant(&'static str),

    #[error("mean of the minimum of {replicas} replicas is infinite")]
    DivergentMean { replicas: usize },

    #[error("every candidate replication factor has an infinite mean")]
    AllUnstable,

    #[error("system is unstable, no finite tail bound exists")]
    UnstableBound,

    #[error("argument outside domain: {0}")]
    DomainError(String),

    #[error("decay-rate root lies beyond the transform domain; feasible up to theta={cap}")]
    RootOutsideDomain { cap: f64 },

    #[error("hyperexponential fit failed: {0}")]
    FitFailed(String),

    #[error("empty sample")]
    EmptySample,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
