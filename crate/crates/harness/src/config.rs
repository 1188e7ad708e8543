//! Configuration file support. Keys mirror the command-line flags; flags
//! win over file values.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Deserialize;

#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct FileConfig {
    pub n: Option<u32>,
    pub ns: Option<Vec<u32>>,
    pub crossover: Option<String>,
    pub crossovers: Option<Vec<String>>,
    pub ls: Option<String>,
    pub policies: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub budget: Option<u64>,
    pub pop: Option<usize>,
    pub tournament: Option<usize>,
    pub mut_prob: Option<f64>,
    pub eval_counting: Option<String>,
    pub runs: Option<u32>,
    pub workers: Option<usize>,
    pub resume: Option<bool>,
    pub alpha: Option<f64>,
    pub metrics: Option<PathBuf>,
    pub out: Option<PathBuf>,
}

impl FileConfig {
    /// Reads a TOML file. A malformed file is a usage error.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading configuration {}", path.display()))?;
        toml::from_str(&text)
            .map_err(|e| crate::usage(format!("invalid configuration {}: {e}", path.display())))
    }

    pub fn load_opt(path: Option<&Path>) -> Result<Self> {
        path.map_or_else(|| Ok(Self::default()), Self::load)
    }
}

/// Parses a key from the configuration file, mapping failures to usage
/// errors.
pub fn parse_key<T>(value: &str, what: &str) -> Result<T>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    value
        .parse()
        .map_err(|e| crate::usage(format!("invalid {what}: {e}")))
}
