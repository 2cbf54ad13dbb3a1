//! Benchmark harness around `uherding-core`: dataset generation and IO, the
//! round-based acquisition loop with temperature and radius adaptation, and
//! CSV result emission. The `uherd` binary exposes it all on the command line.

pub mod config;
pub mod data;
pub mod experiment;

pub use config::ExperimentConfig;
pub use experiment::{run_experiment, RoundRecord, RunResult};

/// Harness errors, split by exit code: config problems exit 1, runtime
/// problems exit 2.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 1,
            HarnessError::Runtime(_) => 2,
        }
    }
}

impl From<uherding_core::Error> for HarnessError {
    fn from(e: uherding_core::Error) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}

impl From<std::io::Error> for HarnessError {
    fn from(e: std::io::Error) -> Self {
        HarnessError::Runtime(e.to_string())
    }
}
