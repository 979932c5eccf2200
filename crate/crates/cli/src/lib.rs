//! Experiment runner and report plumbing behind the `bellpoly` binary.

pub mod cache;
pub mod error;
pub mod experiments;
pub mod report;

pub use cache::{Cache, CacheStatus, Method};
pub use error::{CliError, CliResult};
pub use experiments::Runner;
pub use report::{ExperimentReport, SCHEMA};
