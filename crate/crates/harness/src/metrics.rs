//! The per-run metrics table.

use std::path::Path;

use anyhow::{Context, Result};
use balga_core::analysis::{evals_to_best, median_pairwise_distance};
use balga_core::{Crossover, LocalSearchPolicy, RunRecord};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricsRow {
    pub n: u32,
    pub crossover: Crossover,
    pub policy: LocalSearchPolicy,
    pub seed: u64,
    pub best_fitness: u32,
    pub evals_to_best: u64,
    pub median_pairwise_distance: f64,
}

impl MetricsRow {
    pub fn from_record(record: &RunRecord) -> Result<Self> {
        let tables = record.final_tables()?;
        Ok(Self {
            n: record.config.n,
            crossover: record.config.crossover,
            policy: record.config.policy,
            seed: record.config.seed,
            best_fitness: record.best_fitness,
            evals_to_best: evals_to_best(record),
            median_pairwise_distance: median_pairwise_distance(&tables)?,
        })
    }
}

pub fn write_metrics(path: &Path, rows: &[MetricsRow]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_metrics(path: &Path) -> Result<Vec<MetricsRow>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    r.deserialize()
        .map(|row| row.with_context(|| format!("parsing {}", path.display())))
        .collect()
}
