//! Experiment driver: configuration parsing, the five canned experiments,
//! and CSV result tables. The `irf-estim` binary is a thin
//! wrapper over [`run`]; library users can call the `run_*` functions
//! directly and keep the [`ResultTable`] in memory.

mod config;
mod experiments;
mod table;

pub use config::{ExperimentConfig, ExperimentId, Scenario};
pub use experiments::{
    run, run_crlb_map, run_expansion_error, run_mse_vs_gamma, run_mse_vs_k,
    run_spectral_efficiency,
};
pub use table::{pairwise_sum, ResultTable};

use thiserror::Error;

/// Driver-level failures, split by exit code: config problems (exit 2)
/// versus numerical failures during a run (exit 3).
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerics(String),
}

impl HarnessError {
    /// CLI exit code for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Numerics(_) => 3,
        }
    }
}
