use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vector has no nonzero entry")]
    EmptyVector,

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: u64, dim: u64 },

    #[error("duplicate index {0}")]
    DuplicateIndex(u64),

    #[error("non-finite value at index {0}")]
    NonFinite(u64),

    /// A power transform produced a value that does not fit in an `f64`.
    #[error("floating-point overflow at coordinate {index}{}", sample.map(|s| format!(" of sample {s}")).unwrap_or_default())]
    Overflow { sample: Option<usize>, index: u64 },

    #[error("corrupt input: {0}")]
    CorruptInput(String),

    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),

    #[error("training diverged (non-finite loss) at iteration {iteration}")]
    Divergence { iteration: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("sample {sample}: {source}")]
    AtSample {
        sample: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    /// Attaches a sample index. Overflow errors carry it in place.
    pub fn at_sample(self, sample: usize) -> Self {
        match self {
            Error::Overflow { index, .. } => Error::Overflow {
                sample: Some(sample),
                index,
            },
            e @ Error::AtSample { .. } => e,
            e => Error::AtSample {
                sample,
                source: Box::new(e),
            },
        }
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }
}
