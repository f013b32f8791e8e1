use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{0} is not prime")]
    NotPrime(String),
    #[error("no prime in the window [{lo}, {hi}]")]
    NoPrimeInWindow { lo: u64, hi: u64 },
    #[error("moduli {0} and {1} are not coprime")]
    NonCoprimeModuli(String, String),
    #[error("f^{level}(x) - t is not separable")]
    Inseparable { level: usize },
    #[error("the zero polynomial is not allowed here")]
    ZeroPolynomial,
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
