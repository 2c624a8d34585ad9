use thiserror::Error;

/// Errors raised by constructors, solvers and gadget searches.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input violates an invariant or precondition of the operation.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A bounded search ran out of candidates or budget.
    #[error("search exhausted at {stage}: {detail}")]
    Exhausted { stage: String, detail: String },

    /// Instance exceeds a configured size cap.
    #[error("size cap exceeded: {what} is {got}, cap {cap}")]
    Cap {
        what: String,
        got: usize,
        cap: usize,
    },

    #[error("json: {0}")]
    Json(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn exhausted(stage: impl Into<String>, detail: impl Into<String>) -> Self {
        Error::Exhausted {
            stage: stage.into(),
            detail: detail.into(),
        }
    }

    /// True for errors that mean "searched and found nothing".
    pub fn is_exhaustion(&self) -> bool {
        matches!(self, Error::Exhausted { .. })
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Json(e.to_string())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
