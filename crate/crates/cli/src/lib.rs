//! File formats and command implementations behind the `bcabe` binary.

pub mod commands;
pub mod files;

/// Why a command did not succeed; each maps to one exit code.
#[derive(Debug)]
pub enum Failure {
    /// A check in the report failed.
    Check,
    Usage(String),
    Io(String),
}

impl From<bcabe_core::Error> for Failure {
    fn from(e: bcabe_core::Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Check => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}
