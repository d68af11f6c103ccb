use thiserror::Error;

/// Failure modes shared by every module. The CLI maps each family to its own exit code.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("partial quotient source exhausted: needed {needed} terms, {available} available")]
    Exhausted { needed: usize, available: usize },
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("insufficient precision: {0}")]
    Precision(String),
    #[error("ambiguous step {step}: {what}")]
    Ambiguous { step: i64, what: String },
    #[error("certification failed: {0}")]
    Certification(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub fn precision(msg: impl Into<String>) -> Self {
        Error::Precision(msg.into())
    }

    /// Precision-type failures can in principle be cured by more bits.
    pub fn is_precision(&self) -> bool {
        matches!(self, Error::Precision(_) | Error::Ambiguous { .. })
    }

    pub fn is_validation(&self) -> bool {
        matches!(self, Error::Invalid(_) | Error::Exhausted { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
