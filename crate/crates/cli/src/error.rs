use thiserror::Error;

/// Failures mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("precondition: {0}")]
    Precondition(String),
    #[error("claims failed: {}", .0.join(", "))]
    ClaimFailure(Vec<String>),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Precondition(_) => 2,
            CliError::ClaimFailure(_) => 3,
            CliError::Numerical(_) | CliError::Io(_) => 4,
        }
    }

    /// Short machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Precondition(_) => "precondition",
            CliError::ClaimFailure(_) => "claim_failure",
            CliError::Numerical(_) => "numerical",
            CliError::Io(_) => "io",
        }
    }
}

impl From<kds_core::geometry::GeometryError> for CliError {
    fn from(e: kds_core::geometry::GeometryError) -> Self {
        use kds_core::geometry::GeometryError as G;
        match e {
            G::NotSubextremal { .. } => CliError::Precondition(e.to_string()),
            G::DeltaSelection { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}
