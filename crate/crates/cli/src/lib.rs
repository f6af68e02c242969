//! Experiment driver: parses JSON configs, runs named experiments on the
//! simulation library, and emits CSV/JSON artifacts deterministically.

pub mod config;
pub mod experiments;
pub mod output;
pub mod verify;

use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable, malformed, or inconsistent configuration (exit code 2).
    #[error("invalid config: {0}")]
    ConfigInvalid(String),
    /// A runtime failure inside an experiment (exit code 1).
    #[error("experiment failed: {0}")]
    ExperimentFailed(String),
    /// One or more verification suites failed (exit code 1).
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::ConfigInvalid(_) => 2,
            CliError::ExperimentFailed(_) | CliError::VerificationFailed(_) => 1,
        }
    }
}

pub fn experiment_error(err: impl std::fmt::Display) -> CliError {
    CliError::ExperimentFailed(err.to_string())
}

/// Resolved runtime options shared by all experiments.
#[derive(Debug, Clone)]
pub struct RunContext {
    pub out_dir: PathBuf,
    pub seed_override: Option<u64>,
}

impl RunContext {
    pub fn seed(&self, config_seed: u64) -> u64 {
        self.seed_override.unwrap_or(config_seed)
    }
}
