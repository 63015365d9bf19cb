use thiserror::Error;

use crate::algebra::Rational;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("variable tables do not match: {0} vs {1}")]
    TableMismatch(String, String),

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("expected a polynomial in base variables only, found fiber variable `{0}`")]
    FiberVariable(String),

    #[error("polynomial is not homogeneous of degree {expected} in block {block}")]
    NotHomogeneous { block: &'static str, expected: u32 },

    #[error("module mismatch: {0}")]
    ModuleMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("weight {delta} is critical for fiber degree {k} (p = {p}, delta = -p/(2(n+1)))")]
    CriticalWeight { delta: Rational, k: u32, p: u32 },

    #[error("element is not in the span of the basis")]
    NotInSpan,

    #[error("singular system: {0}")]
    Singular(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
