use std::path::{Path, PathBuf};
use thiserror::Error;

/// Failures of a subcommand, each mapped to a process exit code.
#[derive(Error, Debug)]
pub enum CliError {
    /// Invalid or infeasible configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed run record.
    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse { path: PathBuf, line: usize, column: usize, message: String },

    #[error(transparent)]
    Core(#[from] gibbs_core::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    /// At least one checked invariant did not hold.
    #[error("{failed} of {total} checks failed")]
    InvariantFailure { failed: usize, total: usize },
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Pass: all invariants held.
pub const EXIT_PASS: i32 = 0;
/// An invariant check failed.
pub const EXIT_INVARIANT: i32 = 1;
/// The configuration or input could not be used.
pub const EXIT_CONFIG: i32 = 2;

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Self::Io { path: path.to_path_buf(), source }
    }

    pub fn exit_code(&self) -> i32 {
        use gibbs_core::Error as E;
        match self {
            Self::InvariantFailure { .. } => EXIT_INVARIANT,
            // Numerical breakdowns of a well-posed run are invariant failures.
            Self::Core(E::NotHermitian(_) | E::Support(_)) => EXIT_INVARIANT,
            _ => EXIT_CONFIG,
        }
    }
}
