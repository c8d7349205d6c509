use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("variable count mismatch: {0} vs {1}")]
    VarCountMismatch(usize, usize),

    #[error("radical base mismatch")]
    RadicalMismatch,

    #[error("variable index {index} out of range for {var_count} variables")]
    IndexOutOfRange { index: usize, var_count: usize },

    #[error("pole at evaluation point")]
    Pole,

    #[error("radical value is inconsistent with the base at this point")]
    InconsistentRadical,

    #[error("radical value required to evaluate a radical element")]
    MissingRadicalValue,

    #[error("term limit exceeded: {terms} monomials > cap {cap}")]
    LimitExceeded { terms: usize, cap: usize },

    #[error("weight must be an integer, got {0}")]
    NonIntegerWeight(String),

    #[error("invalid dimension {0}; need n >= 1")]
    InvalidDimension(usize),

    #[error("invalid order {0}; need k >= 1")]
    InvalidOrder(usize),

    #[error("radical context required but disabled")]
    RadicalRequired,

    #[error("result leaves the representable field: {0}")]
    NotRepresentable(String),

    #[error("denominator vanishes identically on the sphere")]
    VanishesOnSphere,

    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("no pole-free samples found after {0} attempts")]
    NoSamples(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
