use crate::prop::AtomIndex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("scope of {size} atoms exceeds the enumeration cap of {cap}")]
    ScopeCap { size: usize, cap: usize },

    #[error("scope must not be empty")]
    EmptyScope,

    #[error("atom {0} is outside the scope")]
    OutOfScope(AtomIndex),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("not a probability distribution: {0}")]
    NotADistribution(String),

    #[error("not a probability assignment: {0}")]
    NotAProbabilityAssignment(String),

    #[error("invalid threshold pair p = {p}, q = {q}: need 0 < q <= p <= 1")]
    InvalidThreshold { p: String, q: String },

    #[error("threshold {0} is outside [0, 1]")]
    ThresholdRange(String),

    #[error("term mentions the formula variable x[{0}], which has no value here")]
    UnboundSymbol(String),

    #[error("assignment violates the Q-formula: {0}")]
    QViolation(String),

    #[error("formula does not have the required shape: {0}")]
    Shape(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("too many distinct atoms ({size}) for truth-table abstraction (cap {cap})")]
    AbstractionCap { size: usize, cap: usize },

    #[error("problem too large: {0}")]
    TooLarge(String),

    #[error("invalid JSON document: {0}")]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}
