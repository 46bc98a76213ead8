use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision error: {0}")]
    Precision(String),
    #[error("divergent integral at {endpoint}: {reason}")]
    Divergent { endpoint: String, reason: String },
    #[error("quadrature did not converge: value {value} with estimated error {error} after {levels} levels")]
    NonConvergence {
        value: String,
        error: String,
        levels: u32,
    },
    #[error("structural error: {0}")]
    Structural(String),
    #[error("unsupported subfamily: {0}")]
    UnsupportedSubfamily(String),
    #[error("evaluation error: {0}")]
    Evaluation(String),
    #[error("insufficient precision: inputs must carry at least {required_digits} digits")]
    Precondition { required_digits: u32 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
