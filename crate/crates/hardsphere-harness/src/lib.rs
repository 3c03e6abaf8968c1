//! Experiment drivers and persistence around `hardsphere-core`: seeded
//! replica fan-out, statistical verdicts at pre-registered tolerances,
//! flat-file configuration, and the CSV / record formats the CLI writes.

pub mod cli;
pub mod config;
pub mod experiments;
pub mod io;
pub mod report;
pub mod stats;

use std::fmt;

/// Harness-level error: core errors plus parsing and IO.
#[derive(Debug)]
pub enum HarnessError {
    Core(hardsphere_core::Error),
    Parse(String),
    Io(std::io::Error),
}

impl fmt::Display for HarnessError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HarnessError::Core(e) => write!(f, "{e}"),
            HarnessError::Parse(msg) => write!(f, "parse error: {msg}"),
            HarnessError::Io(e) => write!(f, "io error: {e}"),
        }
    }
}

impl std::error::Error for HarnessError {}

impl From<hardsphere_core::Error> for HarnessError {
    fn from(e: hardsphere_core::Error) -> Self {
        HarnessError::Core(e)
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Io(e)
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
