//! Command-line harness around `qg-core`.
//!
//! [`run`] drives the experiments behind the `qg` binary. The remaining
//! modules hold config parsing and the on-disk formats.

pub mod config;
pub mod exec;
pub mod output;
pub mod runner;
pub mod snapshot;

pub use config::{parse_config, parse_config_str, ConfigError, Experiment, Issue, RunConfig, Settings};
pub use exec::PoolExecutor;
pub use runner::{read_manifest, run, Contract, RunError, RunManifest};
