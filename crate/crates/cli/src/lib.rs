//! Experiment driver: configuration handling and the pipelines behind the
//! `gxmfg` subcommands.

pub mod commands;
pub mod config;

pub use commands::{run_estimate_sigma, run_eval, run_sample, run_solve};
pub use config::{ConfigOverrides, ExperimentConfig, GameName, Preset};
