use thiserror::Error;

use crate::fdsl::ParseDiagnostic;

/// Errors raised by the solver, the function language and the verifiers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(ParseDiagnostic),

    #[error("arity mismatch: expected {expected} coordinates, got {got}")]
    Arity { expected: usize, got: usize },

    #[error("variable x{index} exceeds declared arity {arity}")]
    VariableOutOfRange { index: usize, arity: usize },

    #[error("invalid position: {0}")]
    InvalidPosition(String),

    #[error("state space exceeded: more than {limit} positions")]
    StateSpaceExceeded { limit: usize },

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("function is not monotone: f({lower:?}) = {lower_value} > f({upper:?}) = {upper_value}")]
    NotMonotone {
        lower: Vec<u32>,
        upper: Vec<u32>,
        lower_value: u32,
        upper_value: u32,
    },

    #[error("axis {axis} out of range for arity {arity}")]
    AxisOutOfRange { axis: usize, arity: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumeration too large: {count} items exceeds cap {cap}")]
    TooLarge { count: u128, cap: u128 },
}

pub type Result<T> = std::result::Result<T, Error>;
