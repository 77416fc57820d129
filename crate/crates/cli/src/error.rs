use thiserror::Error;

/// Failures of a CLI command, each tied to one exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed JSON, polynomial text or index key.
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },
    /// Bad flags, shapes, limits or unsupported requests.
    #[error("argument error: {0}")]
    Argument(String),
    /// A section violating its defining identity.
    #[error("invalid section: {0}")]
    InvalidSection(String),
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("verification failed: {0}")]
    VerifyFailed(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Argument(_) | CliError::Io { .. } => 2,
            CliError::InvalidSection(_) => 3,
            CliError::DegenerateMetric(_) => 4,
            CliError::VerifyFailed(_) | CliError::Internal(_) => 1,
        }
    }

    pub fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Parse { location: location.into(), message: message.into() }
    }
}

impl From<curvlab::Error> for CliError {
    fn from(e: curvlab::Error) -> Self {
        use curvlab::Error as E;
        match e {
            E::Argument(m) | E::Unsupported(m) | E::Limit(m) => CliError::Argument(m),
            E::InvalidSection(m) => CliError::InvalidSection(m),
            E::DegenerateMetric(m) => CliError::DegenerateMetric(m),
            E::Internal(m) => CliError::Internal(m),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
