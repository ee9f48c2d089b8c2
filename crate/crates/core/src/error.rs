//! Crate-wide error type.
//!
//! Errors split into two classes that the CLI maps onto its exit-code
//! contract: [`ErrorKind::Precondition`] (bad parameters, domain violations,
//! config parse errors → exit 2) and [`ErrorKind::Numerical`] (solver
//! breakdown, blow-up, non-convergence → exit 3).

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameter or domain violation detected before any numerics run.
    #[error("domain error: {0}")]
    Domain(String),

    /// Config file rejected; `line` is 1-based.
    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    /// A numerical procedure failed to converge or blew up.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Precondition,
    Numerical,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Domain(_) | Error::Config { .. } => ErrorKind::Precondition,
            Error::Numerical(_) | Error::Io(_) => ErrorKind::Numerical,
        }
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
