use std::fmt;

use serde::Serialize;

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Numerical(thickspray::Error),
    Io { path: String, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(e) if e.is_config_error() => 2,
            CliError::Numerical(_) | CliError::Io { .. } => 3,
        }
    }

    pub fn kind(&self) -> String {
        match self {
            CliError::Config(_) => "ConfigError".into(),
            CliError::Numerical(e) => e.kind().to_string(),
            CliError::Io { .. } => "IoError".into(),
        }
    }

    pub fn report(&self) -> ErrorReport {
        ErrorReport {
            kind: self.kind(),
            message: self.to_string(),
            exit_code: self.exit_code(),
        }
    }

    pub fn io(path: impl AsRef<std::path::Path>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.as_ref().display().to_string();
        move |source| CliError::Io { path, source }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "invalid configuration: {m}"),
            CliError::Numerical(e) => write!(f, "{e}"),
            CliError::Io { path, source } => write!(f, "{path}: {source}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<thickspray::Error> for CliError {
    fn from(e: thickspray::Error) -> Self {
        CliError::Numerical(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io {
            path: "csv output".into(),
            source: e.into(),
        }
    }
}

/// Machine-readable failure written to stderr.
#[derive(Debug, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
    pub exit_code: i32,
}
