//! Convergence and diversity metrics, and the Mann-Whitney-Wilcoxon test.

use std::fmt;

use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::boolfn::{hamming_distance, TruthTable};
use crate::error::{Error, Result};
use crate::ga::RunRecord;
use crate::local_search::LocalSearchPolicy;
use crate::variation::Crossover;

pub const DEFAULT_ALPHA: f64 = 0.05;

/// Largest per-sample size for which p-values are computed exactly.
pub const EXACT_MAX_SIZE: usize = 7;

/// Counter value at which the run's final best fitness first appeared.
pub fn evals_to_best(record: &RunRecord) -> u64 {
    record.fitness_timeline.last().map_or(0, |p| p.0)
}

/// Median of all pairwise Hamming distances; the mean of the two central
/// values when the pair count is even.
pub fn median_pairwise_distance(population: &[TruthTable]) -> Result<f64> {
    if population.len() < 2 {
        return Err(Error::InvalidSample(format!(
            "need at least two individuals, got {}",
            population.len()
        )));
    }
    let mut distances = Vec::with_capacity(population.len() * (population.len() - 1) / 2);
    for (i, a) in population.iter().enumerate() {
        for b in &population[i + 1..] {
            distances.push(hamming_distance(a, b)?);
        }
    }
    distances.sort_unstable();
    let k = distances.len();
    Ok(if k % 2 == 1 {
        distances[k / 2] as f64
    } else {
        (distances[k / 2 - 1] + distances[k / 2]) as f64 / 2.0
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PValueMethod {
    Exact,
    Normal,
}

/// Outcome of a two-sided Mann-Whitney-Wilcoxon test.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MannWhitney {
    /// `U` for the first sample: pairs `(x, y)` with `x > y`, ties count 1/2.
    pub u: f64,
    pub p_value: f64,
    pub significant: bool,
    pub method: PValueMethod,
}

/// Ranks with ties averaged, doubled so they stay integral.
fn doubled_midranks(values: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold 1-based ranks start+1..=end
        let doubled = (start + 1 + end) as u64;
        for &i in &order[start..end] {
            ranks[i] = doubled;
        }
        start = end;
    }
    ranks
}

fn tie_term(values: &[f64]) -> f64 {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut sum = 0.0;
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        let t = (end - start) as f64;
        sum += t * t * t - t;
        start = end;
    }
    sum
}

/// Distribution of the doubled rank sum of `k` items drawn from `ranks`:
/// `counts[s]` is the number of `k`-subsets with doubled rank sum `s`.
fn rank_sum_counts(ranks: &[u64], k: usize) -> Vec<f64> {
    let max_sum: u64 = ranks.iter().sum();
    let width = max_sum as usize + 1;
    // table[j][s]: j items chosen, doubled sum s
    let mut table = vec![vec![0.0f64; width]; k + 1];
    table[0][0] = 1.0;
    for &r in ranks {
        let r = r as usize;
        for j in (1..=k).rev() {
            let (lower, upper) = table.split_at_mut(j);
            let prev = &lower[j - 1];
            let cur = &mut upper[0];
            for s in (r..width).rev() {
                cur[s] += prev[s - r];
            }
        }
    }
    table.swap_remove(k)
}

/// Two-sided test of `xs` against `ys`.
///
/// Both sizes at most [`EXACT_MAX_SIZE`]: exact permutation distribution of
/// the rank sum (ties kept as midranks). Otherwise: normal approximation
/// with tie correction and 0.5 continuity correction. Completely tied data
/// yield `p = 1`.
pub fn mann_whitney_u(xs: &[f64], ys: &[f64], alpha: f64) -> Result<MannWhitney> {
    if xs.is_empty() || ys.is_empty() {
        return Err(Error::InvalidSample("samples must be nonempty".into()));
    }
    if xs.iter().chain(ys).any(|v| v.is_nan()) {
        return Err(Error::InvalidSample("samples contain NaN".into()));
    }
    let (nx, ny) = (xs.len(), ys.len());
    let pooled: Vec<f64> = xs.iter().chain(ys).copied().collect();
    let ranks = doubled_midranks(&pooled);
    let observed: u64 = ranks[..nx].iter().sum();
    let n = (nx + ny) as f64;
    // U = R_x - nx(nx+1)/2 with R_x = observed / 2
    let u = observed as f64 / 2.0 - (nx * (nx + 1)) as f64 / 2.0;

    let (p_value, method) = if nx <= EXACT_MAX_SIZE && ny <= EXACT_MAX_SIZE {
        // doubled expected rank sum nx(N+1) is integral
        let centre = (nx * (nx + ny + 1)) as i64;
        let observed_dev = (observed as i64 - centre).abs();
        let counts = rank_sum_counts(&ranks, nx);
        let total: f64 = counts.iter().sum();
        let extreme: f64 = counts
            .iter()
            .enumerate()
            .filter(|(s, _)| (*s as i64 - centre).abs() >= observed_dev)
            .map(|(_, c)| c)
            .sum();
        ((extreme / total).min(1.0), PValueMethod::Exact)
    } else {
        let mean = (nx * ny) as f64 / 2.0;
        let variance = (nx * ny) as f64 / 12.0 * ((n + 1.0) - tie_term(&pooled) / (n * (n - 1.0)));
        let p = if variance <= 0.0 {
            1.0
        } else {
            let z = ((u - mean).abs() - 0.5).max(0.0) / variance.sqrt();
            erfc(z / std::f64::consts::SQRT_2).min(1.0)
        };
        (p, PValueMethod::Normal)
    };
    Ok(MannWhitney {
        u,
        p_value,
        significant: p_value < alpha,
        method,
    })
}

/// Identifies one experimental cell.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellLabel {
    pub n: u32,
    pub crossover: Crossover,
    pub policy: LocalSearchPolicy,
}

impl CellLabel {
    /// Short form used for heatmap axes, e.g. `CX1-LS2`.
    pub fn axis_label(&self) -> String {
        format!(
            "{}-{}",
            self.crossover.key().to_uppercase(),
            self.policy.key().to_uppercase()
        )
    }
}

impl fmt::Display for CellLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} {} {}", self.n, self.crossover, self.policy)
    }
}

/// Per-run measurements of one cell.
#[derive(Clone, Debug, PartialEq)]
pub struct SampleDistribution {
    pub label: CellLabel,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PairwiseTestResult {
    pub row: CellLabel,
    pub col: CellLabel,
    pub test: MannWhitney,
}

impl PairwiseTestResult {
    pub fn p_value(&self) -> f64 {
        self.test.p_value
    }

    /// p-values close enough to the usual threshold that the choice of
    /// exact versus approximate computation can flip the call.
    pub fn is_borderline(&self) -> bool {
        (0.01..=0.10).contains(&self.test.p_value)
    }
}

/// All pairwise tests among the nine (crossover, policy) cells of one `n`,
/// ordered CX1-LS0, CX1-LS1, ..., CX3-LS2. The diagonal is fixed at `p = 1`.
pub fn heatmap_matrix(
    samples: &[SampleDistribution],
    alpha: f64,
) -> Result<Vec<Vec<PairwiseTestResult>>> {
    let Some(first) = samples.first() else {
        return Err(Error::InvalidSample("no samples".into()));
    };
    let n = first.label.n;
    let mut ordered = Vec::with_capacity(9);
    let mut missing = Vec::new();
    for crossover in Crossover::ALL {
        for policy in LocalSearchPolicy::ALL {
            let label = CellLabel {
                n,
                crossover,
                policy,
            };
            match samples.iter().find(|s| s.label == label) {
                Some(s) if !s.values.is_empty() => ordered.push(s),
                _ => missing.push(label.to_string()),
            }
        }
    }
    if !missing.is_empty() {
        return Err(Error::InvalidSample(format!(
            "missing cells: {}",
            missing.join(", ")
        )));
    }
    let mut matrix: Vec<Vec<PairwiseTestResult>> = Vec::with_capacity(9);
    for (i, a) in ordered.iter().enumerate() {
        let mut row = Vec::with_capacity(9);
        for (j, b) in ordered.iter().enumerate() {
            let mut test = if j < i {
                // mirror the computed cell; U flips to its complement
                let m = matrix[j][i].test;
                MannWhitney {
                    u: (a.values.len() * b.values.len()) as f64 - m.u,
                    ..m
                }
            } else {
                mann_whitney_u(&a.values, &b.values, alpha)?
            };
            if i == j {
                test.p_value = 1.0;
                test.significant = 1.0 < alpha;
            }
            row.push(PairwiseTestResult {
                row: a.label,
                col: b.label,
                test,
            });
        }
        matrix.push(row);
    }
    Ok(matrix)
}

/// Five-number summary; quartiles interpolate linearly between order
/// statistics at position `q (len - 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxplotSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub q3: f64,
    pub max: f64,
}

pub fn boxplot_summary(values: &[f64]) -> Result<BoxplotSummary> {
    if values.is_empty() {
        return Err(Error::InvalidSample("empty sample".into()));
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let pos = p * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
    };
    Ok(BoxplotSummary {
        min: v[0],
        q1: q(0.25),
        median: q(0.5),
        q3: q(0.75),
        max: v[v.len() - 1],
    })
}
