use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// The caller supplied arguments that violate an operation's precondition.
    #[error("input error: {0}")]
    Input(String),

    /// The exact solver would exceed its configured state-space limit.
    #[error("capacity error: {what} is {got}, limit is {limit}{hint}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
        hint: &'static str,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    /// A trial of an experiment failed; carries the offending trial index.
    #[error("trial {trial}: {source}")]
    Trial {
        trial: u64,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad caller input (as opposed to I/O or capacity).
    pub fn is_input(&self) -> bool {
        match self {
            Error::Input(_) | Error::Json(_) => true,
            Error::Trial { source, .. } => source.is_input(),
            _ => false,
        }
    }
}
