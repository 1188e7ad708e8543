//! Experiment harness: single runs, the full experiment matrix, and the
//! statistics that turn per-run metrics into heatmap and boxplot tables.

pub mod cli;
pub mod config;
pub mod experiment;
pub mod metrics;
pub mod stats;
pub mod store;

use std::fmt;

/// An error caused by invalid user input rather than a runtime failure.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}
