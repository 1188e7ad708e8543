//! The experiment matrix: cells of (n, crossover, policy), each repeated
//! with independently seeded runs.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use anyhow::{Context, Result};
use balga_core::{run_ga, Crossover, EvalCounting, GaConfig, LocalSearchPolicy, RunRecord};
use rayon::prelude::*;

use crate::metrics::{write_metrics, MetricsRow};
use crate::store::{read_record, write_record};

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentPlan {
    pub ns: Vec<u32>,
    pub crossovers: Vec<Crossover>,
    pub policies: Vec<LocalSearchPolicy>,
    pub runs: u32,
    pub base_seed: u64,
    pub eval_budget: u64,
    pub population_size: usize,
    pub tournament_size: usize,
    pub mutation_probability: f64,
    pub eval_counting: EvalCounting,
    pub out_dir: PathBuf,
    pub workers: usize,
    pub resume: bool,
}

impl ExperimentPlan {
    pub fn new(out_dir: impl Into<PathBuf>) -> Self {
        Self {
            ns: vec![6, 7, 8, 9],
            crossovers: Crossover::ALL.to_vec(),
            policies: LocalSearchPolicy::ALL.to_vec(),
            runs: 30,
            base_seed: 0,
            eval_budget: GaConfig::DEFAULT_BUDGET,
            population_size: GaConfig::DEFAULT_POPULATION,
            tournament_size: GaConfig::DEFAULT_TOURNAMENT,
            mutation_probability: GaConfig::DEFAULT_MUTATION,
            eval_counting: EvalCounting::default(),
            out_dir: out_dir.into(),
            workers: 1,
            resume: true,
        }
    }

    /// Every run of the plan, ordered by n, crossover, policy, run index.
    pub fn keys(&self) -> Vec<RunKey> {
        let mut keys = Vec::new();
        for &n in &self.ns {
            for &crossover in &self.crossovers {
                for &policy in &self.policies {
                    for run in 0..self.runs {
                        keys.push(RunKey {
                            n,
                            crossover,
                            policy,
                            run,
                        });
                    }
                }
            }
        }
        keys
    }

    pub fn config_for(&self, key: &RunKey) -> GaConfig {
        GaConfig {
            n: key.n,
            population_size: self.population_size,
            eval_budget: self.eval_budget,
            tournament_size: self.tournament_size,
            mutation_probability: self.mutation_probability,
            crossover: key.crossover,
            policy: key.policy,
            seed: derive_seed(self.base_seed, key),
            eval_counting: self.eval_counting,
        }
    }

    pub fn record_path(&self, key: &RunKey) -> PathBuf {
        self.out_dir.join(key.relative_path())
    }

    pub fn metrics_path(&self) -> PathBuf {
        self.out_dir.join("metrics.csv")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RunKey {
    pub n: u32,
    pub crossover: Crossover,
    pub policy: LocalSearchPolicy,
    pub run: u32,
}

impl RunKey {
    pub fn relative_path(&self) -> PathBuf {
        Path::new("records")
            .join(format!("n{}", self.n))
            .join(format!("{}-{}", self.crossover, self.policy))
            .join(format!("run{:03}.json", self.run))
    }

    fn cell(&self) -> (u32, Crossover, LocalSearchPolicy) {
        (self.n, self.crossover, self.policy)
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

fn fnv1a(bytes: &[u8]) -> u64 {
    bytes.iter().fold(0xcbf2_9ce4_8422_2325, |h, &b| {
        (h ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

/// Seed for one run: the base seed mixed with a hash of the run's key.
/// Independent of scheduling and of which other cells the plan contains.
pub fn derive_seed(base_seed: u64, key: &RunKey) -> u64 {
    let tag = format!("n{}/{}/{}/{}", key.n, key.crossover, key.policy, key.run);
    splitmix64(splitmix64(base_seed) ^ fnv1a(tag.as_bytes()))
}

#[derive(Debug, Default)]
pub struct ExperimentSummary {
    pub rows: Vec<MetricsRow>,
    pub computed: usize,
    pub reused: usize,
}

enum Loaded {
    Reused(RunRecord),
    Missing,
    Stale(String),
}

fn load_existing(path: &Path, expected: &GaConfig) -> Loaded {
    if !path.exists() {
        return Loaded::Missing;
    }
    match read_record(path) {
        Ok(r) if &r.config == expected => Loaded::Reused(r),
        Ok(_) => Loaded::Stale("configuration differs".into()),
        Err(e) => Loaded::Stale(format!("{e:#}")),
    }
}

/// Runs every cell of the plan and writes the metrics table.
///
/// With `resume`, runs whose record already exists with a matching
/// configuration are read back instead of recomputed; unreadable or
/// mismatched records are recomputed. `report` receives human-readable
/// progress lines.
pub fn run_experiment(plan: &ExperimentPlan, report: &(dyn Fn(&str) + Sync)) -> Result<ExperimentSummary> {
    fs::create_dir_all(&plan.out_dir)
        .with_context(|| format!("creating output directory {}", plan.out_dir.display()))?;
    let keys = plan.keys();
    for key in &keys {
        plan.config_for(key).validate().map_err(|e| crate::usage(e.to_string()))?;
    }

    let mut remaining: BTreeMap<(u32, Crossover, LocalSearchPolicy), u32> = BTreeMap::new();
    for key in &keys {
        *remaining.entry(key.cell()).or_default() += 1;
    }
    let remaining = Mutex::new(remaining);

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(plan.workers.max(1))
        .build()?;
    let results: Vec<Result<(RunKey, MetricsRow, bool)>> = pool.install(|| {
        keys.par_iter()
            .map(|key| {
                let config = plan.config_for(key);
                let path = plan.record_path(key);
                let (record, reused) = match plan.resume.then(|| load_existing(&path, &config)) {
                    Some(Loaded::Reused(r)) => (r, true),
                    other => {
                        if let Some(Loaded::Stale(why)) = other {
                            report(&format!("re-running {} ({why})", path.display()));
                        }
                        let record = run_ga(&config)?;
                        write_record(&path, &record)?;
                        (record, false)
                    }
                };
                let row = MetricsRow::from_record(&record)?;
                let mut left = remaining.lock().unwrap();
                let count = left.get_mut(&key.cell()).expect("cell is planned");
                *count -= 1;
                if *count == 0 {
                    report(&format!(
                        "cell n={} {} {} complete ({} runs)",
                        key.n, key.crossover, key.policy, plan.runs
                    ));
                }
                Ok((*key, row, reused))
            })
            .collect()
    });

    let mut done = results.into_iter().collect::<Result<Vec<_>>>()?;
    done.sort_by_key(|(key, _, _)| *key);
    let reused = done.iter().filter(|(_, _, r)| *r).count();
    let summary = ExperimentSummary {
        computed: done.len() - reused,
        reused,
        rows: done.into_iter().map(|(_, row, _)| row).collect(),
    };
    write_metrics(&plan.metrics_path(), &summary.rows)?;
    Ok(summary)
}
