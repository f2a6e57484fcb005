//! Error types shared across the crate.

use thiserror::Error;

/// Errors produced by model construction, chart maps, and flow operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("point outside chart domain: {0}")]
    OutsideChart(String),

    #[error("not a fixed point: {0}")]
    NotFixedPoint(String),

    #[error("generator vector is not generic for this model: {0}")]
    NotGeneric(String),

    #[error("flow exponents tie on coordinates {0}; generator is not generic for this model")]
    ExponentTie(String),

    #[error("flows are not supported on sphere models")]
    UnsupportedFlow,

    #[error("chart switching made no progress after {0} consecutive switches")]
    SwitchingThrash(usize),

    #[error("weight inference residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    InferenceFailure { residual: f64, tolerance: f64 },

    #[error("trajectory did not converge within horizon s = {0}")]
    NoConvergence(f64),

    #[error("unknown chart id {0}")]
    UnknownChart(usize),

    #[error("unknown fixed point id {0}")]
    UnknownFixedPoint(usize),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
