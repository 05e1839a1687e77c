use thiserror::Error;

/// Failures of a run, each mapped to a documented exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {field}: {message}")]
    Config { field: String, message: String },

    #[error("internal error: {0}")]
    Internal(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Self::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config { .. } => ExitStatus::ConfigError.code(),
            Self::Internal(_) | Self::Io(_) => ExitStatus::Internal.code(),
        }
    }
}

impl From<qsd_core::Error> for CliError {
    fn from(e: qsd_core::Error) -> Self {
        match e {
            qsd_core::Error::DegenerateEnsemble(_) => Self::config("ensemble", e.to_string()),
            qsd_core::Error::Resource(_) => Self::config("ensemble", e.to_string()),
            _ => Self::Internal(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        Self::Internal(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        Self::Internal(e.to_string())
    }
}

/// Outcome of a completed run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExitStatus {
    Success,
    ConfigError,
    CertificationFailed,
    /// Inconclusive data, or a third-axis decision without a probe.
    Refused,
    Internal,
}

impl ExitStatus {
    pub fn code(self) -> i32 {
        match self {
            Self::Success => 0,
            Self::ConfigError => 2,
            Self::CertificationFailed => 3,
            Self::Refused => 4,
            Self::Internal => 5,
        }
    }
}
