use std::path::PathBuf;

/// Process exit statuses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Success = 0,
    NotConverged = 1,
    InvalidConfig = 2,
    VerificationFailed = 3,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        self as i32
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] abac_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("io: {0}")]
    Stream(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("verification failed: {0} check(s)")]
    Verification(usize),
}

impl CliError {
    pub fn status(&self) -> ExitStatus {
        use abac_core::Error as E;
        match self {
            CliError::Verification(_) => ExitStatus::VerificationFailed,
            CliError::Core(
                E::Breakdown { .. } | E::IndefinitePreconditioner { .. } | E::ImaginaryLeak { .. } | E::NotConverged(_),
            ) => ExitStatus::NotConverged,
            _ => ExitStatus::InvalidConfig,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
