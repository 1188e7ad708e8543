//! Steady-state GA with tournament replacement and optional local search.
//!
//! One step draws `tournament_size` distinct members, crosses the best two,
//! mutates the child with `mutation_probability`, evaluates it, applies the
//! local-search policy and overwrites the tournament's worst member.
//!
//! Random draws happen in this order each step: tournament indices, the
//! crossover's coins (and repair draw), the mutation coin, then the
//! mutation's one-rank and zero-rank. Local search draws nothing.

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::boolfn::{Individual, TruthTable, MAX_VARIABLES};
use crate::error::{Error, Result};
use crate::eval::{EvalCounter, EvalCounting};
use crate::local_search::{apply_policy, LocalSearchPolicy};
use crate::rng::{shuffle, RandomSource, SeededRng};
use crate::variation::{swap_mutation, Crossover};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaConfig {
    pub n: u32,
    pub population_size: usize,
    pub eval_budget: u64,
    pub tournament_size: usize,
    pub mutation_probability: f64,
    pub crossover: Crossover,
    pub policy: LocalSearchPolicy,
    pub seed: u64,
    pub eval_counting: EvalCounting,
}

impl GaConfig {
    pub const DEFAULT_POPULATION: usize = 50;
    pub const DEFAULT_BUDGET: u64 = 500_000;
    pub const DEFAULT_TOURNAMENT: usize = 3;
    pub const DEFAULT_MUTATION: f64 = 0.7;

    pub fn new(n: u32, crossover: Crossover, policy: LocalSearchPolicy, seed: u64) -> Self {
        Self {
            n,
            population_size: Self::DEFAULT_POPULATION,
            eval_budget: Self::DEFAULT_BUDGET,
            tournament_size: Self::DEFAULT_TOURNAMENT,
            mutation_probability: Self::DEFAULT_MUTATION,
            crossover,
            policy,
            seed,
            eval_counting: EvalCounting::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=MAX_VARIABLES).contains(&self.n) {
            return Err(Error::InvalidVariableCount(self.n));
        }
        if self.tournament_size < 2 {
            return Err(Error::InvalidConfig(format!(
                "tournament size must be at least 2, got {}",
                self.tournament_size
            )));
        }
        if self.population_size < self.tournament_size {
            return Err(Error::InvalidConfig(format!(
                "population size {} is smaller than tournament size {}",
                self.population_size, self.tournament_size
            )));
        }
        if self.eval_budget < self.population_size as u64 {
            return Err(Error::InvalidConfig(format!(
                "budget {} cannot cover the initial population of {}",
                self.eval_budget, self.population_size
            )));
        }
        if !(0.0..=1.0).contains(&self.mutation_probability) {
            return Err(Error::InvalidConfig(format!(
                "mutation probability {} is outside [0, 1]",
                self.mutation_probability
            )));
        }
        Ok(())
    }
}

/// Best-so-far bookkeeping over every evaluated individual.
#[derive(Clone, Debug, Default)]
pub struct Progress {
    best: Option<(u32, TruthTable)>,
    timeline: Vec<(u64, u32)>,
}

impl Progress {
    /// Records `ind`, evaluated when the counter read `consumed`.
    pub fn observe(&mut self, ind: &Individual, consumed: u64) {
        let fitness = ind.fitness();
        if self.best.as_ref().is_some_and(|(b, _)| fitness <= *b) {
            return;
        }
        self.best = Some((fitness, ind.table().clone()));
        match self.timeline.last_mut() {
            // uncharged local-search steps share the offspring's counter value
            Some(last) if last.0 == consumed => last.1 = fitness,
            _ => self.timeline.push((consumed, fitness)),
        }
    }

    pub fn best_fitness(&self) -> Option<u32> {
        self.best.as_ref().map(|(f, _)| *f)
    }

    pub fn best_table(&self) -> Option<&TruthTable> {
        self.best.as_ref().map(|(_, t)| t)
    }

    pub fn timeline(&self) -> &[(u64, u32)] {
        &self.timeline
    }

    /// Counter value at which the current best was first reached.
    pub fn evals_to_best(&self) -> u64 {
        self.timeline.last().map_or(0, |p| p.0)
    }
}

/// Uniformly random balanced table: a shuffle of `2^(n-1)` ones and zeros.
pub fn random_balanced_table<R: RandomSource + ?Sized>(n: u32, rng: &mut R) -> Result<TruthTable> {
    if !(1..=MAX_VARIABLES).contains(&n) {
        return Err(Error::InvalidVariableCount(n));
    }
    let size = 1usize << n;
    let mut bits: Vec<bool> = (0..size).map(|i| i < size / 2).collect();
    shuffle(&mut bits, rng);
    TruthTable::new(n, BitString::from_bools(bits))
}

/// Draws and evaluates the initial population, charging one evaluation each.
pub fn init_population<R: RandomSource + ?Sized>(
    config: &GaConfig,
    rng: &mut R,
    counter: &mut EvalCounter,
    progress: &mut Progress,
) -> Result<Vec<Individual>> {
    (0..config.population_size)
        .map(|_| {
            let ind = Individual::evaluate(random_balanced_table(config.n, rng)?);
            counter.charge(1);
            progress.observe(&ind, counter.consumed());
            Ok(ind)
        })
        .collect()
}

/// `k` distinct indices below `len`, by rejection.
fn draw_distinct<R: RandomSource + ?Sized>(len: usize, k: usize, rng: &mut R) -> Vec<usize> {
    let mut picked = Vec::with_capacity(k);
    while picked.len() < k {
        let i = rng.below(len);
        if !picked.contains(&i) {
            picked.push(i);
        }
    }
    picked
}

/// Counters exposed in the run record.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCounts {
    pub steps: u64,
    pub mutations: u64,
    pub local_search_swaps: u64,
}

/// One steady-state breeding step.
pub fn tournament_step<R: RandomSource + ?Sized>(
    population: &mut [Individual],
    config: &GaConfig,
    rng: &mut R,
    counter: &mut EvalCounter,
    progress: &mut Progress,
    counts: &mut StepCounts,
) -> Result<()> {
    let mut entrants = draw_distinct(population.len(), config.tournament_size, rng);
    // best first; ties go to the lower index
    entrants.sort_by(|&a, &b| {
        population[b]
            .fitness()
            .cmp(&population[a].fitness())
            .then(a.cmp(&b))
    });
    let p1 = population[entrants[0]].table().bits();
    let p2 = population[entrants[1]].table().bits();
    let mut child = config.crossover.apply(p1, p2, rng)?;
    if rng.chance(config.mutation_probability) {
        child = swap_mutation(&child, rng)?;
        counts.mutations += 1;
    }
    let child = Individual::evaluate(TruthTable::new(config.n, child)?);
    counter.charge(1);
    progress.observe(&child, counter.consumed());

    let mut swaps = 0;
    let child = apply_policy(child, config.policy, counter, config.eval_counting, |ind, consumed| {
        swaps += 1;
        progress.observe(ind, consumed);
    });
    debug_assert!(child.table().is_balanced());
    debug_assert!(swaps == 0 || child.is_consistent());
    counts.local_search_swaps += swaps;
    counts.steps += 1;

    let worst = *entrants.last().expect("tournament is not empty");
    population[worst] = child;
    Ok(())
}

/// Everything needed to analyse or replay a finished run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub config: GaConfig,
    pub rng: String,
    pub best_fitness: u32,
    pub evals_to_best: u64,
    pub evals_consumed: u64,
    pub counts: StepCounts,
    /// Hexadecimal, first digit's high bit = `f(0, ..., 0)`.
    pub best_table: String,
    /// `(consumed evaluations, best fitness so far)` at each improvement.
    pub fitness_timeline: Vec<(u64, u32)>,
    pub final_population: Vec<String>,
}

impl RunRecord {
    pub fn best_table(&self) -> Result<TruthTable> {
        TruthTable::from_hex(self.config.n, &self.best_table)
    }

    pub fn final_tables(&self) -> Result<Vec<TruthTable>> {
        self.final_population
            .iter()
            .map(|h| TruthTable::from_hex(self.config.n, h))
            .collect()
    }
}

/// Runs the GA until the evaluation budget is spent.
pub fn run_ga(config: &GaConfig) -> Result<RunRecord> {
    config.validate()?;
    let mut rng = SeededRng::new(config.seed);
    let mut counter = EvalCounter::new(config.eval_budget);
    let mut progress = Progress::default();
    let mut counts = StepCounts::default();
    let mut population = init_population(config, &mut rng, &mut counter, &mut progress)?;
    while !counter.exhausted() {
        tournament_step(
            &mut population,
            config,
            &mut rng,
            &mut counter,
            &mut progress,
            &mut counts,
        )?;
    }
    let best = progress.best_table().expect("population is not empty");
    Ok(RunRecord {
        config: config.clone(),
        rng: SeededRng::IDENTIFIER.to_string(),
        best_fitness: progress.best_fitness().unwrap_or(0),
        evals_to_best: progress.evals_to_best(),
        evals_consumed: counter.consumed(),
        counts,
        best_table: best.to_hex(),
        fitness_timeline: progress.timeline().to_vec(),
        final_population: population.iter().map(|i| i.table().to_hex()).collect(),
    })
}
