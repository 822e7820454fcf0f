use std::fmt;

/// Failure classes of a run. Each maps to one exit code.
#[derive(Debug)]
pub enum CliError {
    /// Exit 1.
    Input(String),
    /// Exit 2.
    Certification(String),
    /// Exit 3.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::Certification(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "invalid input: {m}"),
            CliError::Certification(m) => write!(f, "certification failure: {m}"),
            CliError::Internal(m) => write!(f, "internal inconsistency: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<treeloc::Error> for CliError {
    fn from(e: treeloc::Error) -> Self {
        use treeloc::Error::*;
        let msg = e.to_string();
        match e {
            Domain(_) | InvalidInput(_) | Assumption(_) | Resource(_) => CliError::Input(msg),
            CertificationFailure { .. } | Convergence { .. } | Search { .. } | SearchDomain { .. } => {
                CliError::Certification(msg)
            }
            Inconsistency(_) | SingularEnergy(_) | Conditioning(_) => CliError::Internal(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Internal(format!("io: {e}"))
    }
}
