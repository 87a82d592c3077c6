//! Library side of the `dwphase` command-line runner, so the subcommands can
//! be driven from tests.

pub mod config;
pub mod output;
pub mod runner;

pub use config::{ConfigError, ExperimentConfig, RunPlan};
pub use runner::{Manifest, Options, RunError, RunRecord};
