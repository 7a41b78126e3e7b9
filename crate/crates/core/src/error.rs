use thiserror::Error;

/// Reasons a Las Vegas step gives up without producing an answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    /// The element/retry budget ran out.
    BudgetExhausted,
    /// An eigenvalue set does not match any Singer model spectrum.
    NotSingerSpectrum,
    /// Every pivot needed for extraction vanished.
    DegenerateEntries,
}

impl std::fmt::Display for FailureKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            FailureKind::BudgetExhausted => "budget exhausted",
            FailureKind::NotSingerSpectrum => "not a Singer spectrum",
            FailureKind::DegenerateEntries => "degenerate entries",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("target is not in the subgroup generated by the base")]
    NotInSubgroup,
    #[error("capacity exceeded: {0}")]
    CapacityExceeded(String),
    #[error("element is not primitive")]
    NotPrimitive,
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("unsupported factor: {0}")]
    UnsupportedFactor(String),
    #[error("constraint violation: {}", .0.join("; "))]
    ConstraintViolation(Vec<String>),
    #[error("failure: {0}")]
    Failure(FailureKind),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
