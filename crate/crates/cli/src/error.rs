use thiserror::Error;

/// Failure classes, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("check failed: {0}")]
    Check(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Check(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<qalgebra::Error> for CliError {
    fn from(e: qalgebra::Error) -> Self {
        use qalgebra::Error as E;
        match e {
            E::Numerical(_) | E::Instability { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Config(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Prefixes a module error with the config context it came from.
pub fn context(what: &str) -> impl FnOnce(qalgebra::Error) -> CliError + '_ {
    move |e| match CliError::from(e) {
        CliError::Config(m) => CliError::Config(format!("{what}: {m}")),
        CliError::Numerical(m) => CliError::Numerical(format!("{what}: {m}")),
        other => other,
    }
}
