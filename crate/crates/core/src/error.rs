use thiserror::Error;

/// Errors raised anywhere in the simulation, certification and discrimination pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("conditioning event has zero probability: {0}")]
    Conditioning(String),

    #[error("degenerate ensemble: {0}")]
    DegenerateEnsemble(String),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("trusted probe is inconclusive: P(+1|3) = {p_plus:.6}, margin {margin:.6}")]
    InconclusiveProbe { p_plus: f64, margin: f64 },

    #[error("ensemble contains a conjugate pair; a trusted probe result is required")]
    MdiRequired,

    #[error("uncertified devices: the certification gate did not pass")]
    Uncertified,

    #[error("inconclusive decision: margin {margin:.6} below required {required:.6}")]
    Inconclusive { margin: f64, required: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
