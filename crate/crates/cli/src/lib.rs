//! Experiment runner for the `newton-lab` library: polygon and Hasse
//! polynomial emission, verification campaigns, engine cross-checks.

pub mod args;
pub mod cache;
pub mod campaign;
pub mod commands;
pub mod config;
pub mod error;
pub mod report;
pub mod sampling;

pub use campaign::{run_crosscheck, run_verify, select_vectors, CrosscheckOutcome, VerifyOutcome};
pub use commands::{cmd_hasse, cmd_oracle, cmd_polygon};
pub use config::{ConfigOverrides, Engines, ExperimentConfig, Mode};
pub use error::{CliError, Result};
