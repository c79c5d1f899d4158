//! Batch experiment runner: `key = value` configs in, CSV/JSON reports and a
//! manifest of certificates out.

pub mod config;
pub mod families;
pub mod run;

pub use config::{parse_config, parse_with_overrides, ConfigError, Experiment, ExperimentConfig};
pub use run::{execute, run, Outcome, Report, RunError};
