use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the solver pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected:?}, found {found:?}")]
    Dimension {
        expected: (usize, usize),
        found: (usize, usize),
    },

    #[error("invalid argument: {0}")]
    Domain(String),

    #[error("non-finite iterate at inner iteration {iteration}{}", outer.map(|o| format!(" (outer iteration {o})")).unwrap_or_default())]
    Numerical {
        iteration: usize,
        outer: Option<usize>,
    },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("instance too large for enumeration: {combinations} candidate trees exceed the limit of {limit}")]
    TooLarge { combinations: u128, limit: u128 },

    #[error("config error: {0}")]
    Config(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    /// Attach an outer-iteration index to a numerical failure.
    pub fn at_outer(self, outer: usize) -> Self {
        match self {
            Error::Numerical { iteration, .. } => Error::Numerical {
                iteration,
                outer: Some(outer),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
