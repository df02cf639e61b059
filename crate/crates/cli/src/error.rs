use thiserror::Error;

/// Command failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("convergence failure: {0}")]
    Convergence(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Convergence(_) => 4,
        }
    }
}

impl From<qimetric::Error> for CliError {
    fn from(e: qimetric::Error) -> Self {
        match e {
            qimetric::Error::Config(_) => CliError::Config(e.to_string()),
            qimetric::Error::StepTooLarge { .. } => CliError::Convergence(e.to_string()),
            _ => CliError::Domain(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_by_kind() {
        let step = qimetric::Error::StepTooLarge {
            est_error: 1.0,
            limit: 1e-6,
            step: 0.1,
        };
        assert_eq!(CliError::from(step).exit_code(), 4);
        assert_eq!(CliError::from(qimetric::Error::ZeroLambda1).exit_code(), 3);
        assert_eq!(CliError::from(qimetric::Error::Config("x".into())).exit_code(), 2);
    }
}
