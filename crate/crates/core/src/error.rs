use crate::numerics::C64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("pencil not regular")]
    SingularPencil,
    #[error("lambda = {0} is not in the resolvent set")]
    NotInResolventSet(C64),
    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),
    #[error("subspace chain did not stabilize")]
    ChainNotStabilized,
    #[error("R(mu) is not injective on the stabilized range")]
    NotInjectiveOnVk,
    #[error("staircase zero pattern violated (residual {0:e})")]
    PatternViolation(f64),
    #[error("projector chain stalled at stage {0}")]
    ChainStalled(usize),
    #[error("range/kernel decomposition unavailable")]
    DecompositionUnavailable,
    #[error("insufficient smoothness: derivative of order {needed} required, forcing provides up to {available}")]
    InsufficientSmoothness { needed: usize, available: usize },
    #[error("horizon too short: truncation bound {0:e}")]
    HorizonTooShort(f64),
    #[error("implicit Euler step matrix singular")]
    StepSingular,
    #[error("Schur iteration failed to converge")]
    NoConvergence,
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
