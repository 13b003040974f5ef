use thiserror::Error;

/// Errors surfaced by the library. Each variant maps onto a stable CLI exit
/// code (see the `disprop` binary).
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// An argument lies outside the domain of an operation (e.g. θ ∉ [0,1]).
    #[error("domain error: {0}")]
    Domain(String),

    /// Input data failed validation; `field` names the offending location.
    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    /// A division refers to agents or pieces that do not exist.
    #[error("structural error: {0}")]
    Structural(String),

    /// A procedure was called outside its precondition.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// A combinatorial search would exceed its explicit work budget.
    #[error("budget exceeded: needed more than {budget} work units ({what})")]
    Budget { what: String, budget: u64 },

    /// An internal consistency check failed. Indicates a bug.
    #[error("internal consistency error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
