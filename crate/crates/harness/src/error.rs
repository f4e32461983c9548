use std::path::PathBuf;

/// Failures surfaced by the harness and the CLI.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Reading or writing a file failed.
    #[error("{}: {source}", path.display())]
    Io {
        /// File involved.
        path: PathBuf,
        /// Underlying error.
        source: std::io::Error,
    },
    /// A JSON document did not parse or did not match its schema.
    #[error("{}: {source}", path.display())]
    Json {
        /// File involved.
        path: PathBuf,
        /// Underlying error.
        source: serde_json::Error,
    },
    /// A user-supplied value is out of its domain.
    #[error("invalid input: {0}")]
    Input(String),
    /// A library routine rejected its arguments or failed numerically.
    #[error(transparent)]
    Core(#[from] cfma_core::Error),
    /// Some Monte Carlo trials failed.
    #[error("{failures} of {trials} trial evaluations failed numerically")]
    TrialFailures {
        /// Failed (trial, power) evaluations.
        failures: u64,
        /// Total (trial, power) evaluations.
        trials: u64,
    },
}

impl Error {
    /// Process exit code: 1 for input errors, 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        use cfma_core::Error as C;
        match self {
            Error::Io { .. } | Error::Json { .. } | Error::Input(_) => 1,
            Error::Core(
                C::Dimension { .. }
                | C::NonFinite { .. }
                | C::NotSymmetric { .. }
                | C::NotPsd { .. }
                | C::PowerExceeded { .. }
                | C::InvalidArgument(_)
                | C::LinearlyDependent,
            ) => 1,
            Error::Core(_) | Error::TrialFailures { .. } => 2,
        }
    }
}

/// Result alias for this crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;
