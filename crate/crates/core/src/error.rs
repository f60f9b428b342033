use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("alignment error: {what} has {left} frames but {right} were expected")]
    Alignment {
        what: String,
        left: usize,
        right: usize,
    },

    #[error("training diverged at epoch {epoch} (loss is not finite)")]
    Diverged { epoch: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("corrupt file {path}: {reason}")]
    CorruptFile { path: String, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("data error in utterance {utterance}: {reason}")]
    Data { utterance: String, reason: String },

    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn corrupt(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::CorruptFile {
            path: path.into(),
            reason: reason.into(),
        }
    }

    pub fn data(utterance: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Data {
            utterance: utterance.into(),
            reason: reason.into(),
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_) | Error::Config(_) => 1,
            Error::Diverged { .. } | Error::Numerical(_) => 3,
            Error::InsufficientData(_)
            | Error::Alignment { .. }
            | Error::CorruptFile { .. }
            | Error::Data { .. }
            | Error::Io(_) => 2,
        }
    }

    /// Attach the utterance id to an error raised while processing it.
    pub fn in_utterance(self, id: &str) -> Self {
        match self {
            e @ (Error::Data { .. } | Error::Diverged { .. } | Error::Numerical(_)) => e,
            other => Error::data(id, other.to_string()),
        }
    }
}
