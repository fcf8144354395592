use thiserror::Error;

/// Crate-wide error type. The CLI maps each variant onto a distinct exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("capacity guard exceeded: {0}")]
    Capacity(String),

    #[error("hitting-set construction did not converge after {rounds} rounds ({remaining} oversized clusters/bunches left, |A|={a_size})")]
    NonConvergence {
        rounds: usize,
        remaining: usize,
        a_size: usize,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
