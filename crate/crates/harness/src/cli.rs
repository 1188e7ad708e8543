//! Command-line interface.

use std::path::PathBuf;
use std::time::Instant;

use anyhow::{Context, Result};
use balga_core::{run_ga, Crossover, EvalCounting, GaConfig, LocalSearchPolicy};
use clap::{ArgAction, Args, Parser, Subcommand};

use crate::config::{parse_key, FileConfig};
use crate::experiment::{run_experiment, ExperimentPlan};
use crate::metrics::read_metrics;
use crate::stats::{borderline_cells, compute_stats, write_stats};
use crate::store::write_record;
use crate::usage;

#[derive(Debug, Parser)]
#[command(name = "balga", version, about = "Balanced GA with local search for nonlinear Boolean functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Execute a single GA run and write its record.
    Run(RunArgs),
    /// Execute every (n, crossover, policy) cell of an experiment plan.
    Experiment(ExperimentArgs),
    /// Compute heatmap and boxplot tables from a metrics table.
    Stats(StatsArgs),
}

#[derive(Debug, Args, Default)]
pub struct GaArgs {
    /// Evaluation budget per run [default: 500000]
    #[arg(long)]
    pub budget: Option<u64>,
    /// Population size [default: 50]
    #[arg(long)]
    pub pop: Option<usize>,
    /// Tournament size [default: 3]
    #[arg(long)]
    pub tournament: Option<usize>,
    /// Mutation probability [default: 0.7]
    #[arg(long = "mut-prob")]
    pub mut_prob: Option<f64>,
    /// applied-only, offspring-only or all-probes [default: applied-only]
    #[arg(long = "eval-counting")]
    pub eval_counting: Option<EvalCounting>,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// TOML configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Number of variables
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..=16))]
    pub n: Option<u32>,
    /// cx1, cx2 or cx3
    #[arg(long)]
    pub crossover: Option<Crossover>,
    /// ls0, ls1 or ls2
    #[arg(long)]
    pub ls: Option<LocalSearchPolicy>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub ga: GaArgs,
    /// Record file [default: run-n<N>-<cx>-<ls>-s<seed>.json]
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Variable counts [default: 6,7,8,9]
    #[arg(long = "n", value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..=16))]
    pub ns: Vec<u32>,
    /// Crossovers [default: cx1,cx2,cx3]
    #[arg(long = "crossover", value_delimiter = ',')]
    pub crossovers: Vec<Crossover>,
    /// Local-search policies [default: ls0,ls1,ls2]
    #[arg(long = "ls", value_delimiter = ',')]
    pub policies: Vec<LocalSearchPolicy>,
    /// Runs per cell [default: 30]
    #[arg(long)]
    pub runs: Option<u32>,
    /// Base seed from which per-run seeds are derived [default: 0]
    #[arg(long)]
    pub seed: Option<u64>,
    #[command(flatten)]
    pub ga: GaArgs,
    /// Output directory [default: results]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: available cores]
    #[arg(long)]
    pub workers: Option<usize>,
    /// Reuse complete records already in the output directory [default: true]
    #[arg(long, action = ArgAction::Set)]
    pub resume: Option<bool>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Metrics table [default: results/metrics.csv]
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Output directory [default: directory of the metrics table]
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Significance level [default: 0.05]
    #[arg(long)]
    pub alpha: Option<f64>,
}

fn opt_key<T>(flag: Option<T>, file: Option<&String>, what: &str) -> Result<Option<T>>
where
    T: std::str::FromStr,
    T::Err: std::fmt::Display,
{
    match (flag, file) {
        (Some(v), _) => Ok(Some(v)),
        (None, Some(s)) => parse_key(s, what).map(Some),
        (None, None) => Ok(None),
    }
}

fn list_key<T>(flag: Vec<T>, file: Option<&Vec<String>>, what: &str, default: &[T]) -> Result<Vec<T>>
where
    T: std::str::FromStr + Clone,
    T::Err: std::fmt::Display,
{
    if !flag.is_empty() {
        return Ok(flag);
    }
    match file {
        Some(items) => items.iter().map(|s| parse_key(s, what)).collect(),
        None => Ok(default.to_vec()),
    }
}

struct GaSettings {
    budget: u64,
    pop: usize,
    tournament: usize,
    mut_prob: f64,
    eval_counting: EvalCounting,
}

fn ga_settings(args: GaArgs, file: &FileConfig) -> Result<GaSettings> {
    Ok(GaSettings {
        budget: args.budget.or(file.budget).unwrap_or(GaConfig::DEFAULT_BUDGET),
        pop: args.pop.or(file.pop).unwrap_or(GaConfig::DEFAULT_POPULATION),
        tournament: args
            .tournament
            .or(file.tournament)
            .unwrap_or(GaConfig::DEFAULT_TOURNAMENT),
        mut_prob: args.mut_prob.or(file.mut_prob).unwrap_or(GaConfig::DEFAULT_MUTATION),
        eval_counting: opt_key(args.eval_counting, file.eval_counting.as_ref(), "eval-counting")?
            .unwrap_or_default(),
    })
}

pub fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Stats(args) => cmd_stats(args),
    }
}

pub fn run_config(args: RunArgs) -> Result<(GaConfig, PathBuf)> {
    let file = FileConfig::load_opt(args.config.as_deref())?;
    let n = args
        .n
        .or(file.n)
        .ok_or_else(|| usage("--n is required"))?;
    let crossover = opt_key(args.crossover, file.crossover.as_ref(), "crossover")?
        .ok_or_else(|| usage("--crossover is required"))?;
    let policy = opt_key(args.ls, file.ls.as_ref(), "ls")?.ok_or_else(|| usage("--ls is required"))?;
    let seed = args.seed.or(file.seed).unwrap_or(0);
    let ga = ga_settings(args.ga, &file)?;
    let config = GaConfig {
        n,
        population_size: ga.pop,
        eval_budget: ga.budget,
        tournament_size: ga.tournament,
        mutation_probability: ga.mut_prob,
        crossover,
        policy,
        seed,
        eval_counting: ga.eval_counting,
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    let out = args
        .out
        .or(file.out)
        .unwrap_or_else(|| PathBuf::from(format!("run-n{n}-{crossover}-{policy}-s{seed}.json")));
    Ok((config, out))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let (config, out) = run_config(args)?;
    let start = Instant::now();
    let record = run_ga(&config)?;
    let elapsed = start.elapsed();
    write_record(&out, &record)?;
    println!(
        "n={} {} {} seed={}: best fitness {} after {} evaluations ({} consumed) in {:.2?}",
        config.n,
        config.crossover,
        config.policy,
        config.seed,
        record.best_fitness,
        record.evals_to_best,
        record.evals_consumed,
        elapsed
    );
    println!("best table {}", record.best_table);
    println!("record written to {}", out.display());
    Ok(())
}

pub fn experiment_plan(args: ExperimentArgs) -> Result<ExperimentPlan> {
    let file = FileConfig::load_opt(args.config.as_deref())?;
    let defaults = ExperimentPlan::new("results");
    let ns = if !args.ns.is_empty() {
        args.ns
    } else {
        file.ns.clone().or(file.n.map(|n| vec![n])).unwrap_or(defaults.ns.clone())
    };
    let cx_file = file.crossovers.clone().or(file.crossover.clone().map(|c| vec![c]));
    let ls_file = file.policies.clone().or(file.ls.clone().map(|c| vec![c]));
    let crossovers = list_key(args.crossovers, cx_file.as_ref(), "crossover", &defaults.crossovers)?;
    let policies = list_key(args.policies, ls_file.as_ref(), "ls", &defaults.policies)?;
    let ga = ga_settings(args.ga, &file)?;
    let workers = args
        .workers
        .or(file.workers)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(usage("--workers must be positive"));
    }
    let runs = args.runs.or(file.runs).unwrap_or(defaults.runs);
    if runs == 0 {
        return Err(usage("--runs must be positive"));
    }
    Ok(ExperimentPlan {
        ns,
        crossovers,
        policies,
        runs,
        base_seed: args.seed.or(file.seed).unwrap_or(defaults.base_seed),
        eval_budget: ga.budget,
        population_size: ga.pop,
        tournament_size: ga.tournament,
        mutation_probability: ga.mut_prob,
        eval_counting: ga.eval_counting,
        out_dir: args.out.or(file.out).unwrap_or(defaults.out_dir),
        workers,
        resume: args.resume.or(file.resume).unwrap_or(true),
    })
}

fn cmd_experiment(args: ExperimentArgs) -> Result<()> {
    let plan = experiment_plan(args)?;
    let total = plan.keys().len();
    println!(
        "experiment: {} runs into {} with {} worker(s)",
        total,
        plan.out_dir.display(),
        plan.workers
    );
    let start = Instant::now();
    let summary = run_experiment(&plan, &|line| eprintln!("{line}"))?;
    println!(
        "{} runs computed, {} reused in {:.2?}; metrics in {}",
        summary.computed,
        summary.reused,
        start.elapsed(),
        plan.metrics_path().display()
    );
    Ok(())
}

fn cmd_stats(args: StatsArgs) -> Result<()> {
    let file = FileConfig::load_opt(args.config.as_deref())?;
    let metrics = args
        .metrics
        .or(file.metrics)
        .unwrap_or_else(|| PathBuf::from("results/metrics.csv"));
    let alpha = args
        .alpha
        .or(file.alpha)
        .unwrap_or(balga_core::analysis::DEFAULT_ALPHA);
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(usage(format!("--alpha must be in (0, 1), got {alpha}")));
    }
    let out = args
        .out
        .or(file.out)
        .or_else(|| metrics.parent().map(|p| p.to_path_buf()))
        .unwrap_or_default();
    let rows = read_metrics(&metrics)?;
    let stats = compute_stats(&rows, alpha).context("computing statistics")?;
    let files = write_stats(&stats, &out)?;
    for s in &stats {
        println!("n={}: {} runs", s.n, rows.iter().filter(|r| r.n == s.n).count());
    }
    let borderline = borderline_cells(&stats);
    if !borderline.is_empty() {
        println!("borderline p-values (0.01 <= p <= 0.10):");
        for line in borderline {
            println!("  {line}");
        }
    }
    println!("{} files written to {}", files.len(), out.display());
    Ok(())
}
