//! Batch front-end for the `orlicz-core` experiments: TOML experiment
//! configs, hypothesis preflight, report files and the `orlicz` binary.

pub mod config;
pub mod error;
pub mod format;
pub mod gridio;
pub mod preflight;
pub mod runner;
pub mod setup;
pub mod suite;

pub use config::ExperimentConfig;
pub use error::CliError;
