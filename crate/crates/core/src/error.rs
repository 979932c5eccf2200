use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("matrix is singular")]
    Singular,
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),
    #[error("invalid behavior: {0}")]
    InvalidBehavior(String),
    #[error("invalid relabeling: {0}")]
    InvalidRelabeling(String),
    #[error("invalid lifting map: {0}")]
    InvalidLift(String),
    #[error("invalid family parameters: {0}")]
    InvalidFamily(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("per-setting distributions disagree on the first party's marginal (setting {setting})")]
    MarginalMismatch { setting: usize },
    #[error("{what}: {count} exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, count: usize, cap: usize },
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
