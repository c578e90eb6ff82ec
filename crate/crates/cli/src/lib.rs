//! Command implementations behind the `landscape` binary.

pub mod args;
pub mod commands;
pub mod manifest;
pub mod report;

use std::fmt;

pub use args::{Cli, Command};
pub use commands::run;
pub use manifest::RunManifest;

/// Exit codes: 2 usage or contract violation, 3 data/IO, 4 numeric failure.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub const USAGE: i32 = 2;
    pub const DATA: i32 = 3;
    pub const NUMERIC: i32 = 4;

    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: Self::USAGE,
            message: message.into(),
        }
    }

    pub fn data(message: impl Into<String>) -> Self {
        Self {
            code: Self::DATA,
            message: message.into(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

impl From<landscape_core::Error> for CliError {
    fn from(e: landscape_core::Error) -> Self {
        use landscape_core::Error as E;
        let code = match e {
            E::Contract(_) => Self::USAGE,
            E::EmptyStudy { .. } | E::Io { .. } | E::Parse { .. } => Self::DATA,
            E::Numeric(_) => Self::NUMERIC,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Thread count from `--threads`, else `LANDSCAPE_THREADS`, else rayon's default.
pub fn thread_count(flag: Option<usize>) -> Result<Option<usize>, CliError> {
    if let Some(n) = flag {
        return Ok(Some(n));
    }
    match std::env::var("LANDSCAPE_THREADS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::usage(format!("LANDSCAPE_THREADS='{v}' is not a thread count"))),
        Err(_) => Ok(None),
    }
}
