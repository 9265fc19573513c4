use std::process::ExitCode;

use caputo_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("numeric failure: {0}")]
    Numeric(CoreError),

    #[error("solver failure: {0}")]
    Solver(CoreError),

    #[error("cannot access {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Numeric(_) => 3,
            CliError::Solver(_) => 4,
        })
    }

    /// Maps a library error raised while evaluating derivatives or oracles.
    pub fn numeric(e: CoreError) -> Self {
        if is_input_error(&e) {
            CliError::Usage(e.to_string())
        } else {
            CliError::Numeric(e)
        }
    }

    /// Maps a library error raised while solving an FDE.
    pub fn solver(e: CoreError) -> Self {
        if is_input_error(&e) {
            CliError::Usage(e.to_string())
        } else {
            CliError::Solver(e)
        }
    }
}

fn is_input_error(e: &CoreError) -> bool {
    matches!(
        e,
        CoreError::Syntax { .. } | CoreError::InvalidParameter(_) | CoreError::DerivativeCap(_)
    )
}

pub type CliResult<T> = std::result::Result<T, CliError>;
