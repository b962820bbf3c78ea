use std::fmt;
use std::path::Path;

/// Input errors exit with 2, everything else with 1.
#[derive(Debug)]
pub enum CliError {
    Input(String),
    Internal(String),
}

impl CliError {
    pub fn input(msg: String) -> Self {
        CliError::Input(msg)
    }

    pub fn internal(msg: String) -> Self {
        CliError::Internal(msg)
    }

    /// Prefixes the message with a path unless it already names one.
    pub fn context(self, path: &Path) -> Self {
        let p = path.display().to_string();
        match self {
            CliError::Input(m) if !m.starts_with(&p) => CliError::Input(format!("{p}: {m}")),
            CliError::Internal(m) if !m.starts_with(&p) => CliError::Internal(format!("{p}: {m}")),
            other => other,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Internal(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Input(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<graphsim::Error> for CliError {
    fn from(e: graphsim::Error) -> Self {
        if e.is_input_error() {
            CliError::Input(e.to_string())
        } else {
            CliError::Internal(e.to_string())
        }
    }
}
