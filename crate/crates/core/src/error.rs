use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("number of variables must be in 1..=16, got {0}")]
    InvalidVariableCount(u32),
    #[error("expected {expected} bits, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("bitstring of length {len} has weight {weight}, expected {expected}")]
    Unbalanced {
        len: usize,
        weight: usize,
        expected: usize,
    },
    #[error("positions {y} and {z} hold the same value; swapping them is a no-op")]
    MeaninglessSwap { y: usize, z: usize },
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid encoding: {0}")]
    InvalidEncoding(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid sample: {0}")]
    InvalidSample(String),
}

pub type Result<T> = std::result::Result<T, Error>;
