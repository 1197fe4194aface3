use thiserror::Error;

/// Errors raised anywhere in the construction, certification and analysis pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("NotPrime: {0} is not a prime")]
    NotPrime(u32),
    #[error("ModulusNotIrreducible: {0}")]
    ModulusNotIrreducible(String),
    #[error("FieldTooLarge: order {0} exceeds the supported range")]
    FieldTooLarge(u64),
    #[error("DivisionByZero")]
    DivisionByZero,
    #[error("FieldMismatch: operands live in different fields")]
    FieldMismatch,
    #[error("NotASubfield: degree {d} does not divide {m}")]
    NotASubfield { d: u32, m: u32 },
    #[error("BadCurveParams: {0}")]
    BadCurveParams(String),
    #[error("DegreeTooLarge: deg G' = {deg} is not below |S| = {bound}")]
    DegreeTooLarge { deg: u64, bound: u64 },
    #[error("BadPartition: {0}")]
    BadPartition(String),
    #[error("MissingConstraint: variable {0} has no good-polynomial constraint")]
    MissingConstraint(String),
    #[error("PoleAtPoint: denominator vanishes at point {0}")]
    PoleAtPoint(usize),
    #[error("LengthMismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("BudgetExceeded: {needed} messages exceed the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("MissingEllG: this construction needs l(G) supplied")]
    MissingEllG,
    #[error("AllRecoverySetsErased: position {0} has no erasure-free recovery set")]
    AllRecoverySetsErased(usize),
    #[error("SingularInterpolation: recovery set of position {0} does not determine it")]
    SingularInterpolation(usize),
    #[error("FormatError: {0}")]
    FormatError(String),
    #[error("ConfigError: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
