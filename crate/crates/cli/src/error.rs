use thiserror::Error;

/// Failures of a subcommand, each with its process exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0} verification check(s) failed")]
    Verification(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("data error: {0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verification(_) => 1,
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
        }
    }
}

impl From<pulseforge::Error> for CliError {
    fn from(e: pulseforge::Error) -> Self {
        use pulseforge::Error as E;
        match e {
            E::Io(_) | E::Json(_) | E::Data(_) | E::Parse { .. } | E::Device(_) => CliError::Data(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Data(e.to_string())
    }
}
