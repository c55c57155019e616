//! Weyl constants, fits, the composed-operator checker and the experiment runner.

pub mod composed;
pub mod config;
pub mod constants;
pub mod fit;
pub mod report;
pub mod runner;

use std::path::Path;

use thiserror::Error;

pub use composed::{composed_operator_check, composed_prediction, ComposedReport, JumpFunction, SymbolFactor};
pub use config::{ExperimentConfig, ExperimentKind, MultiplierSpec, Route};
pub use constants::{constants, ConstantsReport};
pub use fit::{weyl_fit, weyl_fit_values, FitOptions, WeylFitResult};
pub use report::{CheckResult, RunSummary};
pub use runner::{run_batch, run_experiment};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExperimentError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("computation failed: {0}")]
    Compute(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl ExperimentError {
    pub fn config(e: impl std::fmt::Display) -> Self {
        Self::Config(e.to_string())
    }

    pub fn compute(e: impl std::fmt::Display) -> Self {
        Self::Compute(e.to_string())
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Self::Io(format!("{}: {e}", path.display()))
    }

    /// 3 for configuration errors, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 3,
            Self::Compute(_) | Self::Io(_) => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, ExperimentError>;

impl From<crate::linalg::LinalgError> for ExperimentError {
    fn from(e: crate::linalg::LinalgError) -> Self {
        Self::Compute(e.to_string())
    }
}
