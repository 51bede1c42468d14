use num_bigint::BigUint;
use thiserror::Error;

use crate::search::ApWitness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("no leading digit: value must be at least 1")]
    ZeroValue,

    #[error("base must be at least 2 (got {0})")]
    BaseTooSmall(BigUint),

    #[error("exponent n = 0 has no n-th root")]
    ZeroExponent,

    #[error("progression length k = {0} is too short (need k >= {1})")]
    ProgressionTooShort(u64, u64),

    #[error("common difference must be at least 1")]
    ZeroDifference,

    #[error("progression start {start} exceeds the bound {bound}")]
    StartExceedsBound { start: BigUint, bound: BigUint },

    #[error("empty exponent range: n_min = {0} > n_max = {1}")]
    EmptyRange(u64, u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid coloring: {0}")]
    InvalidColoring(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("record {record}: {reason}")]
    InvariantViolation { record: String, reason: String },

    #[error("malformed solver output: {0}")]
    MalformedSolverOutput(String),

    #[error("solver model rejected: monochromatic progression {0}")]
    ModelRejected(ApWitness),

    #[error("solver model is not a coloring: {0}")]
    InvalidModel(String),

    #[error("certificate rejected: {0}")]
    CertificateRejected(String),

    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
