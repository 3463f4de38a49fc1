//! Crate-wide error type.
//!
//! Every fallible operation in the crate reports one of these variants; they
//! are deliberately flat so the CLI can map any failure to a single exit code
//! and a one-line diagnostic.

use crate::circuit::Shape;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("unknown semiring id `{0}`")]
    UnknownSemiring(String),

    #[error("zp modulus {0} is not prime")]
    NotPrime(u64),

    #[error("modulus {0} is out of range (must be at least 2)")]
    BadModulus(u64),

    #[error("operation requires a finite carrier, but the active semiring is `nat`")]
    InfiniteCarrier,

    #[error("budget exceeded: {needed} cases exceed the configured budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u64 },

    #[error("natural-number overflow during {op}")]
    Overflow { op: &'static str },

    #[error("shape mismatch in {context}: {left} is not compatible with {right}")]
    ShapeMismatch {
        left: Shape,
        right: Shape,
        context: String,
    },

    #[error("generator `{gen}` is not supported over semiring `{semiring}`")]
    UnsupportedGenerator { gen: String, semiring: String },

    #[error("`{0}` is not a polynomial generator")]
    NonPolynomialGenerator(String),

    #[error("syntax error at line {line}, column {col}: {msg}")]
    SyntaxError {
        line: usize,
        col: usize,
        msg: String,
    },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("constant {code} is out of range for a carrier of size {size}")]
    ConstOutOfRange { code: u64, size: u64 },

    #[error("incomplete function table: {0}")]
    IncompleteTable(String),

    #[error("split point {split} is out of range for arity {arity}")]
    SplitOutOfRange { split: usize, arity: usize },

    #[error("index {index} is out of range for arity {arity}")]
    IndexOutOfRange { index: usize, arity: usize },

    #[error("semiring mismatch: file declares `{file}` but `{active}` is active")]
    SemiringMismatch { file: String, active: String },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
