//! Experiment harness around `fraclap-core`.
//!
//! The library half of the `fraclap` binary: TOML experiment configs, a
//! catalog of named benchmark domains, the experiment implementations,
//! a small worker pool for suite runs, and report writers (JSON, CSV,
//! static SVG). Everything here is deterministic: rerunning the same
//! config reproduces every numeric byte of the report; only the timing
//! block differs.

pub mod catalog;
pub mod config;
pub mod experiments;
pub mod golden;
pub mod plots;
pub mod report;
pub mod runner;

pub use catalog::{catalog, find_domain, CatalogEntry};
pub use config::{load_config, resolve, AnchorList, ConfigError, ExperimentConfig, Kind, Resolved};
pub use experiments::{run_experiment, Check, Outcome, RunError, Series};
pub use report::{write_report, Report, Timing};
