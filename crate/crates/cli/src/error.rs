use std::fmt;
use std::path::Path;

/// A failed command: exit code 1 for bad input, 2 for data or runtime
/// failures.
#[derive(Debug)]
pub struct CliError {
    pub validation: bool,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        Self {
            validation: true,
            message: message.into(),
        }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Self {
            validation: false,
            message: message.into(),
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::runtime(format!("{}: {e}", path.display()))
    }

    pub fn exit_code(&self) -> u8 {
        if self.validation {
            1
        } else {
            2
        }
    }
}

impl From<fairsfs_core::Error> for CliError {
    fn from(e: fairsfs_core::Error) -> Self {
        Self {
            validation: e.is_validation(),
            message: e.to_string(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        // diagnostics stay on one line
        f.write_str(&self.message.replace('\n', " "))
    }
}
