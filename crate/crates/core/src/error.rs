use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("q = {0} is outside the supported range 2..=16")]
    UnsupportedSize(u32),
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("Gram matrix is not Hermitian")]
    NotHermitian,
    #[error("radical dimension {radical} is invalid for a space of dimension {dim}")]
    InvalidRadicalDim { dim: usize, radical: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("instance too large: {0}")]
    InstanceTooLarge(String),
    #[error("walk count not constant on position class {0}")]
    ClassNotConstant(String),
    #[error("position class ND is empty for q = 2")]
    UndefinedClass,
    #[error("link is disconnected: {0}")]
    LinkDisconnected(String),
    #[error("not collapsible: {0}")]
    NotCollapsible(String),
    #[error("modular ranks disagree and exact escalation is too large: {0}")]
    PrimeCollision(String),
    #[error("not a chain of non-degenerate subspaces")]
    NotAChain,
    #[error("chain contains a degenerate subspace")]
    DegenerateMember,
    #[error("unknown strategy {kind} '{name}' (known: {known})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        known: String,
    },
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
