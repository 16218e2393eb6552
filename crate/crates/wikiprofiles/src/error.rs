use std::io;
use std::path::PathBuf;

/// Crate-wide error type.
///
/// Variants map onto the CLI exit-code contract: I/O failures exit with 3,
/// malformed or invalid input (XML, schema, contract violations) with 2;
/// usage errors (exit 1) are produced by argument parsing before any
/// `Error` is constructed.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("malformed XML at byte {offset}: {message}")]
    Xml { offset: u64, message: String },

    #[error("{path}:{line}: field `{field}`: {message}")]
    Schema {
        path: String,
        line: u64,
        field: String,
        message: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn schema(
        path: impl Into<String>,
        line: u64,
        field: impl Into<String>,
        message: impl Into<String>,
    ) -> Self {
        Error::Schema {
            path: path.into(),
            line,
            field: field.into(),
            message: message.into(),
        }
    }

    /// Process exit code for this error under the CLI contract
    /// (1 = usage, 2 = malformed/invalid input, 3 = I/O).
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { .. } => 3,
            Error::Xml { .. } | Error::Schema { .. } | Error::Invalid(_) | Error::Numeric(_) => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
