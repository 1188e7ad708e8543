//! Heatmap and boxplot tables derived from the metrics table.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use balga_core::analysis::{
    boxplot_summary, heatmap_matrix, BoxplotSummary, CellLabel, PairwiseTestResult,
    SampleDistribution,
};
use balga_core::{Crossover, LocalSearchPolicy};

use crate::metrics::MetricsRow;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    Convergence,
    Diversity,
}

impl Metric {
    pub fn name(self) -> &'static str {
        match self {
            Metric::Convergence => "convergence",
            Metric::Diversity => "diversity",
        }
    }

    fn value(self, row: &MetricsRow) -> f64 {
        match self {
            Metric::Convergence => row.evals_to_best as f64,
            Metric::Diversity => row.median_pairwise_distance,
        }
    }
}

/// Tests and summaries for one metric at one `n`.
#[derive(Clone, Debug)]
pub struct MetricStats {
    pub metric: Metric,
    pub heatmap: Vec<Vec<PairwiseTestResult>>,
    pub boxplots: Vec<(CellLabel, usize, BoxplotSummary)>,
}

#[derive(Clone, Debug)]
pub struct SizeStats {
    pub n: u32,
    pub convergence: MetricStats,
    pub diversity: MetricStats,
}

impl SizeStats {
    pub fn metric(&self, metric: Metric) -> &MetricStats {
        match metric {
            Metric::Convergence => &self.convergence,
            Metric::Diversity => &self.diversity,
        }
    }
}

fn cells(n: u32) -> impl Iterator<Item = CellLabel> {
    Crossover::ALL.into_iter().flat_map(move |crossover| {
        LocalSearchPolicy::ALL.into_iter().map(move |policy| CellLabel {
            n,
            crossover,
            policy,
        })
    })
}

fn samples(rows: &[MetricsRow], n: u32, metric: Metric) -> Vec<SampleDistribution> {
    cells(n)
        .map(|label| SampleDistribution {
            label,
            values: rows
                .iter()
                .filter(|r| r.n == n && r.crossover == label.crossover && r.policy == label.policy)
                .map(|r| metric.value(r))
                .collect(),
        })
        .collect()
}

fn metric_stats(rows: &[MetricsRow], n: u32, metric: Metric, alpha: f64) -> Result<MetricStats> {
    let samples = samples(rows, n, metric);
    let heatmap = heatmap_matrix(&samples, alpha)?;
    let boxplots = samples
        .iter()
        .map(|s| Ok((s.label, s.values.len(), boxplot_summary(&s.values)?)))
        .collect::<Result<_>>()?;
    Ok(MetricStats {
        metric,
        heatmap,
        boxplots,
    })
}

/// Every `n` present in `rows` must have all nine cells.
pub fn compute_stats(rows: &[MetricsRow], alpha: f64) -> Result<Vec<SizeStats>> {
    let ns: BTreeSet<u32> = rows.iter().map(|r| r.n).collect();
    if ns.is_empty() {
        bail!("metrics table is empty");
    }
    let missing: Vec<String> = ns
        .iter()
        .flat_map(|&n| cells(n))
        .filter(|l| {
            !rows
                .iter()
                .any(|r| r.n == l.n && r.crossover == l.crossover && r.policy == l.policy)
        })
        .map(|l| format!("({}, {}, {})", l.n, l.crossover, l.policy))
        .collect();
    if !missing.is_empty() {
        bail!("incomplete metrics, missing cells: {}", missing.join(" "));
    }
    ns.into_iter()
        .map(|n| {
            Ok(SizeStats {
                n,
                convergence: metric_stats(rows, n, Metric::Convergence, alpha)?,
                diversity: metric_stats(rows, n, Metric::Diversity, alpha)?,
            })
        })
        .collect()
}

fn write_heatmap(path: &Path, matrix: &[Vec<PairwiseTestResult>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header = vec!["label".to_string()];
    header.extend(matrix[0].iter().map(|c| c.col.axis_label()));
    w.write_record(&header)?;
    for row in matrix {
        let mut fields = vec![row[0].row.axis_label()];
        fields.extend(row.iter().map(|c| c.p_value().to_string()));
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

fn write_tests(path: &Path, matrix: &[Vec<PairwiseTestResult>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["row", "col", "u", "p_value", "method", "significant", "borderline"])?;
    for (i, row) in matrix.iter().enumerate() {
        for cell in &row[i + 1..] {
            w.write_record([
                cell.row.axis_label(),
                cell.col.axis_label(),
                cell.test.u.to_string(),
                cell.p_value().to_string(),
                format!("{:?}", cell.test.method).to_lowercase(),
                cell.test.significant.to_string(),
                cell.is_borderline().to_string(),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn write_boxplots(path: &Path, boxplots: &[(CellLabel, usize, BoxplotSummary)]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.write_record(["crossover", "policy", "count", "min", "q1", "median", "q3", "max"])?;
    for (label, count, b) in boxplots {
        w.write_record([
            label.crossover.key().to_string(),
            label.policy.key().to_string(),
            count.to_string(),
            b.min.to_string(),
            b.q1.to_string(),
            b.median.to_string(),
            b.q3.to_string(),
            b.max.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Writes `heatmap_*`, `tests_*` and `boxplot_*` files for every `n` and
/// returns their paths.
pub fn write_stats(stats: &[SizeStats], out_dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(out_dir).with_context(|| format!("creating {}", out_dir.display()))?;
    let mut files = Vec::new();
    for s in stats {
        for metric in [Metric::Convergence, Metric::Diversity] {
            let m = s.metric(metric);
            let name = metric.name();
            let heat = out_dir.join(format!("heatmap_{name}_n{}.csv", s.n));
            write_heatmap(&heat, &m.heatmap)?;
            let tests = out_dir.join(format!("tests_{name}_n{}.csv", s.n));
            write_tests(&tests, &m.heatmap)?;
            let boxes = out_dir.join(format!("boxplot_{name}_n{}.csv", s.n));
            write_boxplots(&boxes, &m.boxplots)?;
            files.extend([heat, tests, boxes]);
        }
    }
    Ok(files)
}

/// Off-diagonal cells with p in [0.01, 0.10], one line each.
pub fn borderline_cells(stats: &[SizeStats]) -> Vec<String> {
    let mut out = Vec::new();
    for s in stats {
        for metric in [Metric::Convergence, Metric::Diversity] {
            let m = s.metric(metric);
            for (i, row) in m.heatmap.iter().enumerate() {
                for cell in row[i + 1..].iter().filter(|c| c.is_borderline()) {
                    out.push(format!(
                        "n={} {}: {} vs {} p={}",
                        s.n,
                        metric.name(),
                        cell.row.axis_label(),
                        cell.col.axis_label(),
                        cell.p_value()
                    ));
                }
            }
        }
    }
    out
}
