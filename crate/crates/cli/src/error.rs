//! CLI failures and their process exit codes.

use thiserror::Error;

/// A failed command.  [`CliError::exit_code`] maps each kind to the
/// documented exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Malformed chart or config file (exit 2).
    #[error("parse error in {file}: {message}")]
    Parse { file: String, message: String },

    /// Invalid input or a violated precondition (exit 2).
    #[error("{0}")]
    Precondition(String),

    /// Numerics could not certify a result (exit 3).
    #[error("{0}")]
    Numeric(String),

    /// A checked inequality is violated (exit 4); the report is still written.
    #[error("{0}")]
    Violation(String),

    /// Reading or writing a file failed (exit 1).
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Parse { .. } | CliError::Precondition(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Violation(_) => 4,
        }
    }
}

impl From<lcext::Error> for CliError {
    fn from(e: lcext::Error) -> Self {
        use lcext::Error as E;
        match e {
            E::Precondition(_) | E::Parameter { .. } | E::Domain { .. } => {
                CliError::Precondition(e.to_string())
            }
            E::NonConvergence { .. } | E::Inconclusive { .. } | E::Divergent(_) => {
                CliError::Numeric(e.to_string())
            }
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
