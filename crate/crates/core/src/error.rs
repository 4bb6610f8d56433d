use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid factorization of n: {0}")]
    InvalidFactorization(String),
    #[error("class index {index} out of range for {classes} classes")]
    ClassIndex { index: usize, classes: usize },
    #[error("prime {prime} does not lie in class {class}")]
    NotInClass { prime: u64, class: usize },
    #[error("a forced class member needs a count of at least one")]
    ForceWithZeroCount,
    #[error("{0} is not a prime factor of n")]
    NotABase(u64),
    #[error("exponent overflow while computing the cyclotomic tower")]
    ExponentOverflow,
    #[error("factoring effort cap of {cap} iterations exceeded on cofactor {value}")]
    EffortExceeded { value: String, cap: u64 },
    #[error("criterion inapplicable for this split: {0}")]
    Inapplicable(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("missing checkpoint {path}: {hint}")]
    MissingCheckpoint { path: PathBuf, hint: String },
    #[error("malformed checkpoint {path}: {reason}")]
    BadCheckpoint { path: PathBuf, reason: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
