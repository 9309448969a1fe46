use thiserror::Error;

/// Errors raised by environments, oracles, policies, evaluators and the harness.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CmabError {
    #[error("unknown super arm {0}")]
    UnknownSuperArm(usize),
    #[error("super arm space is implicit; an explicit enumeration is required")]
    ImplicitSpace,
    #[error("exact enumeration needs {edges} relevant edges, above the cap of {cap}")]
    EnumerationCap { edges: usize, cap: usize },
    #[error("oracle `{oracle}` does not support {instance} instances")]
    UnsupportedInstance { oracle: String, instance: String },
    #[error("super arm list is empty")]
    EmptySpace,
    #[error("outcome {value} for arm {arm} lies outside [0, 1]")]
    OutcomeOutOfRange { arm: usize, value: f64 },
    #[error("feedback for round {got} does not match policy round {expected}")]
    RoundMismatch { expected: u64, got: u64 },
    #[error("arm {0} is not triggered by any super arm")]
    UntriggerableArm(usize),
    #[error("cluster {0} is not part of any super arm")]
    UncoverableCluster(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for CmabError {
    fn from(e: std::io::Error) -> Self {
        CmabError::Io(e.to_string())
    }
}

pub type Result<T, E = CmabError> = std::result::Result<T, E>;
