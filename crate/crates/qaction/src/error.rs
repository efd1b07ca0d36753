use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error in {op}: {msg}")]
    Domain { op: &'static str, msg: String },

    /// A result exceeds the representable floating-point range.
    #[error("overflow in {op}: {msg}")]
    Overflow { op: &'static str, msg: String },

    /// An iterative scheme exhausted its budget without meeting tolerance.
    #[error("{op} did not converge: {msg}")]
    NonConvergence { op: &'static str, msg: String },

    /// No trajectory exists for the requested energy/boundary data.
    #[error("infeasible energy in {op}: {msg}")]
    InfeasibleEnergy { op: &'static str, msg: String },

    /// Root bracketing failed; carries the attainable ranges for diagnosis.
    #[error("bracketing failure in {op}: {msg}")]
    Bracketing { op: &'static str, msg: String },

    /// A relaxation path crossed the x <= 0 barrier.
    #[error("positivity violation in {op}: {msg}")]
    Positivity { op: &'static str, msg: String },

    /// Invalid configuration or parameter set, named field included.
    #[error("invalid configuration: field `{field}`: {msg}")]
    Validation { field: String, msg: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("JSON error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn domain(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Domain { op, msg: msg.into() }
    }
    pub fn overflow(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Overflow { op, msg: msg.into() }
    }
    pub fn no_convergence(op: &'static str, msg: impl Into<String>) -> Self {
        Error::NonConvergence { op, msg: msg.into() }
    }
    pub fn infeasible(op: &'static str, msg: impl Into<String>) -> Self {
        Error::InfeasibleEnergy { op, msg: msg.into() }
    }
    pub fn bracketing(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Bracketing { op, msg: msg.into() }
    }
    pub fn positivity(op: &'static str, msg: impl Into<String>) -> Self {
        Error::Positivity { op, msg: msg.into() }
    }
    pub fn validation(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Validation { field: field.into(), msg: msg.into() }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
