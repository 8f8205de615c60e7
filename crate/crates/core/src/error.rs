use thiserror::Error;

pub type Result<T> = std::result::Result<T, BeadError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeadError {
    /// Input does not have the right shape (counts, ranges, parse failures).
    #[error("malformed input: {0}")]
    Structural(String),
    /// Well-formed input that violates a mathematical precondition.
    #[error("domain error: {0}")]
    Domain(String),
    /// A kernel or determinant hypothesis `beta + T z not in 2 pi i Z` fails.
    #[error("pole: {0}")]
    Pole(String),
    #[error("budget exceeded: {what} needs {needed}, budget is {budget}{}", detail.as_deref().map(|d| format!(" ({d})")).unwrap_or_default())]
    Budget {
        what: &'static str,
        needed: u128,
        budget: u128,
        detail: Option<String>,
    },
    /// A computed quantity failed an internal consistency test.
    #[error("numerical inconsistency: {0}")]
    Numerical(String),
}

impl BeadError {
    pub fn structural(msg: impl Into<String>) -> Self {
        BeadError::Structural(msg.into())
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        BeadError::Domain(msg.into())
    }

    pub fn is_resource(&self) -> bool {
        matches!(self, BeadError::Budget { .. })
    }
}
