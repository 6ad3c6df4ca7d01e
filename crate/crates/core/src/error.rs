use thiserror::Error;

/// Errors raised by the numeric routines and the parameter validators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid value for `{key}`: {constraint} (got {value})")]
    InvalidParameter {
        key: String,
        constraint: String,
        value: String,
    },

    #[error("gamma function has a pole at {0}")]
    Pole(f64),

    #[error("result overflows f64 ({0})")]
    Overflow(String),

    #[error("series did not converge within {terms} terms")]
    NonConvergence { terms: usize },

    #[error("argument outside validated range: {0}")]
    OutOfRange(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("divergence exponent undefined: {0}")]
    UndefinedExponent(String),
}

impl Error {
    pub fn invalid(key: &str, constraint: &str, value: impl ToString) -> Self {
        Error::InvalidParameter {
            key: key.to_string(),
            constraint: constraint.to_string(),
            value: value.to_string(),
        }
    }

    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
