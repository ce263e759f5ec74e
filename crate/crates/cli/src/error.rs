use std::fmt;

/// Exit code 2 for usage errors, 1 for everything else.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config values or parameter combinations.
    Usage(String),
    /// A verification, solver or comparison failure.
    Failed(String),
    Other(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failed(_) | CliError::Other(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Failed(m) => write!(f, "failed: {m}"),
            CliError::Other(e) => write!(f, "error: {e:#}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Other(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(e.into())
    }
}

/// Library errors: rejected inputs are usage errors, everything the
/// numerics report is a failure.
impl From<landau_core::LandauError> for CliError {
    fn from(e: landau_core::LandauError) -> Self {
        use landau_core::LandauError as E;
        match e {
            E::Domain(_) => CliError::Usage(e.to_string()),
            _ => CliError::Failed(e.to_string()),
        }
    }
}
