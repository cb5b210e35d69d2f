//! Batch driver: reads a JSON configuration of regions, features, integrands
//! and tasks, runs the probes and writes a report with per-series CSVs.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod expr;
pub mod run;

pub use config::{parse_config, Config, ConfigError};
pub use run::{run, Report, RunError, TaskOutcome};
