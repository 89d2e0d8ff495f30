//! Batch driver for the Kirchhoff double phase solver: TOML configuration,
//! hypothesis checks, solves, parameter sweeps and plain-text artifacts.

pub mod config;
pub mod report;
pub mod run;

use std::path::PathBuf;

pub use config::{Mode, RunConfig};
pub use report::render_report;
pub use run::{run, RunOutcome};

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_HYPOTHESIS: i32 = 3;
pub const EXIT_NONCONVERGED: i32 = 4;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Runtime(String),
    #[error(transparent)]
    Core(#[from] kirchhoff_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => EXIT_CONFIG,
            _ => EXIT_RUNTIME,
        }
    }
}
