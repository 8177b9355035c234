use thiserror::Error;

/// A single violated contract or configuration invariant.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldError {
    pub field: &'static str,
    pub message: String,
}

impl std::fmt::Display for FieldError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{name}` out of domain: {reason}")]
    Domain { name: &'static str, reason: String },

    #[error("invalid contract: {}", display_list(.0))]
    InvalidContract(Vec<FieldError>),

    #[error("energy level {0} MWh is not on the grid")]
    OffGrid(f64),

    #[error("action {de} MWh is not allowed at level {e} MWh")]
    ActionNotAllowed { e: f64, de: f64 },

    #[error("non-finite coefficient at time index {m}, energy level {e} MWh")]
    NonFinite { m: usize, e: f64 },

    #[error("map derivative vanishes at x = {0}")]
    SingularDerivative(f64),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("statistics: {0}")]
    Statistics(String),
}

fn display_list(errs: &[FieldError]) -> String {
    errs.iter()
        .map(|e| e.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        name,
        reason: reason.into(),
    }
}
