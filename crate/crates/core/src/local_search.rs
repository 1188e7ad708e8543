//! Swap-based local search on Walsh spectra.
//!
//! A swap exchanges a one and a zero of the truth table, so every
//! coefficient moves by at most 4 and the nonlinearity by at most 2. A swap
//! gains +2 exactly when the largest magnitude `M` drops to `M - 4`. Every
//! coefficient at `|W(a)| = M` must then move towards zero, which pins
//! `(-1)^(f(x) ^ a·x) = sign(W(a))` for both swapped positions `x`. The
//! search first collects the positions satisfying that constraint and only
//! pairs those, checking the coefficients at `M - 4` that could climb back.
//!
//! Candidates are ordered as pairs `(y, z)` with `y < z` in lexicographic
//! order, skipping pairs with equal values; the first +2 swap in that order
//! is the one applied.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::boolfn::{apply_swap_in_place, dot, Individual};
use crate::error::{Error, Result};
use crate::eval::{EvalCounter, EvalCounting};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum LocalSearchPolicy {
    /// No local search.
    #[serde(rename = "ls0")]
    None,
    /// At most one improving swap.
    #[serde(rename = "ls1")]
    SingleStep,
    /// Improving swaps until a local optimum.
    #[serde(rename = "ls2")]
    SteepestAscent,
}

impl LocalSearchPolicy {
    pub const ALL: [LocalSearchPolicy; 3] = [
        LocalSearchPolicy::None,
        LocalSearchPolicy::SingleStep,
        LocalSearchPolicy::SteepestAscent,
    ];

    pub fn key(self) -> &'static str {
        match self {
            LocalSearchPolicy::None => "ls0",
            LocalSearchPolicy::SingleStep => "ls1",
            LocalSearchPolicy::SteepestAscent => "ls2",
        }
    }
}

impl fmt::Display for LocalSearchPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for LocalSearchPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "ls0" => Ok(LocalSearchPolicy::None),
            "ls1" => Ok(LocalSearchPolicy::SingleStep),
            "ls2" => Ok(LocalSearchPolicy::SteepestAscent),
            _ => Err(Error::Parse(format!(
                "unknown local search policy {s:?} (expected ls0, ls1 or ls2)"
            ))),
        }
    }
}

/// A swap of two positions holding different values.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SwapCandidate {
    pub y: usize,
    pub z: usize,
    pub gain: i32,
}

/// Result of scanning for the first improving swap.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Probe {
    pub swap: Option<SwapCandidate>,
    /// Valid swaps enumerated up to and including the returned one, or all
    /// of them when none improves.
    pub probes: u64,
}

#[inline]
fn chi(bit: u32) -> i32 {
    1 - 2 * bit as i32
}

struct Neighbourhood {
    /// Positions compatible with every maximal coefficient.
    candidates: Vec<usize>,
    /// `(a, W(a))` at magnitude `M - 4`.
    near: Vec<(usize, i32)>,
    target: i32,
}

fn neighbourhood(ind: &Individual) -> Option<Neighbourhood> {
    let w = ind.spectrum().coeffs();
    let max = ind.spectrum().max_abs();
    let target = max - 4;
    if target < 0 {
        return None;
    }
    let top: Vec<(usize, i32)> = w
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() == max)
        .map(|(a, &c)| (a, c.signum()))
        .collect();
    let near: Vec<(usize, i32)> = w
        .iter()
        .enumerate()
        .filter(|(_, c)| c.abs() == target)
        .map(|(a, &c)| (a, c))
        .collect();
    let table = ind.table();
    let candidates = (0..table.len())
        .filter(|&x| {
            let fx = table.get(x) as u32;
            top.iter().all(|&(a, s)| chi(fx ^ dot(a, x)) == s)
        })
        .collect();
    Some(Neighbourhood {
        candidates,
        near,
        target,
    })
}

impl Neighbourhood {
    fn improves(&self, ind: &Individual, y: usize, z: usize) -> bool {
        let sign = if ind.table().get(y) { -2 } else { 2 };
        self.near.iter().all(|&(a, wa)| {
            let d = sign * (chi(dot(a, z)) - chi(dot(a, y)));
            (wa + d).abs() <= self.target
        })
    }

    fn pairs<'a>(&'a self, ind: &'a Individual) -> impl Iterator<Item = (usize, usize)> + 'a {
        let table = ind.table();
        self.candidates.iter().enumerate().flat_map(move |(k, &y)| {
            self.candidates[k + 1..]
                .iter()
                .filter(move |&&z| table.get(z) != table.get(y))
                .map(move |&z| (y, z))
        })
    }
}

/// All swaps raising the nonlinearity by exactly 2, in enumeration order.
pub fn two_improvement_set(ind: &Individual) -> Vec<SwapCandidate> {
    let Some(hood) = neighbourhood(ind) else {
        return Vec::new();
    };
    hood.pairs(ind)
        .filter(|&(y, z)| hood.improves(ind, y, z))
        .map(|(y, z)| SwapCandidate { y, z, gain: 2 })
        .collect()
}

/// The first swap raising the nonlinearity by exactly 2, if any.
pub fn two_improvement_first(ind: &Individual) -> Option<SwapCandidate> {
    let hood = neighbourhood(ind)?;
    let first = hood.pairs(ind).find(|&(y, z)| hood.improves(ind, y, z));
    first.map(|(y, z)| SwapCandidate { y, z, gain: 2 })
}

/// [`two_improvement_first`] together with the number of valid swaps a
/// plain lexicographic scan would have evaluated.
pub fn probe_first_improvement(ind: &Individual) -> Probe {
    let swap = two_improvement_first(ind);
    let probes = enumeration_rank(ind, swap.map(|s| (s.y, s.z)));
    Probe { swap, probes }
}

/// Number of valid pairs `(i, j)`, `i < j`, up to and including `stop`
/// (all valid pairs when `stop` is `None`).
fn enumeration_rank(ind: &Individual, stop: Option<(usize, usize)>) -> u64 {
    let table = ind.table();
    let size = table.len();
    let total_ones = table.weight() as u64;
    let (last_row, stop_col) = stop.unwrap_or((size, size));
    let mut count = 0u64;
    let mut ones_seen = 0u64;
    for i in 0..last_row.min(size) {
        let bit = table.get(i);
        if bit {
            ones_seen += 1;
        }
        let ones_after = total_ones - ones_seen;
        let later = (size - 1 - i) as u64;
        count += if bit { later - ones_after } else { ones_after };
    }
    if stop.is_some() {
        let fy = table.get(last_row);
        count += (last_row + 1..=stop_col)
            .filter(|&j| table.get(j) != fy)
            .count() as u64;
    }
    count
}

/// Applies `policy` to a freshly evaluated offspring.
///
/// Every applied swap is charged according to `counting` and reported to
/// `on_step` with the counter value after charging. Search stops early if
/// the budget runs out; with budget to spare, the steepest-ascent result
/// has an empty 2-Improvement set.
pub fn apply_policy(
    mut ind: Individual,
    policy: LocalSearchPolicy,
    counter: &mut EvalCounter,
    counting: EvalCounting,
    mut on_step: impl FnMut(&Individual, u64),
) -> Individual {
    let max_steps = match policy {
        LocalSearchPolicy::None => return ind,
        LocalSearchPolicy::SingleStep => 1,
        LocalSearchPolicy::SteepestAscent => usize::MAX,
    };
    let mut steps = 0;
    while steps < max_steps && !counter.exhausted() {
        let swap = match counting {
            EvalCounting::AllProbes => {
                let probe = probe_first_improvement(&ind);
                if probe.probes > counter.remaining() {
                    counter.charge(counter.remaining());
                    break;
                }
                counter.charge(probe.probes);
                probe.swap
            }
            EvalCounting::AppliedOnly => {
                let swap = two_improvement_first(&ind);
                if swap.is_some() {
                    counter.charge(1);
                }
                swap
            }
            EvalCounting::OffspringOnly => two_improvement_first(&ind),
        };
        let Some(swap) = swap else { break };
        let before = ind.fitness();
        apply_swap_in_place(&mut ind, swap.y, swap.z).expect("improving swap is valid");
        debug_assert_eq!(ind.fitness(), before + 2);
        on_step(&ind, counter.consumed());
        steps += 1;
    }
    ind
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{apply_swap, TruthTable};
    use crate::rng::{shuffle, SeededRng};

    fn random_balanced(n: u32, rng: &mut SeededRng) -> Individual {
        let size = 1usize << n;
        let mut bits: Vec<u8> = (0..size).map(|i| (i < size / 2) as u8).collect();
        shuffle(&mut bits, rng);
        Individual::evaluate(TruthTable::from_bits(&bits).unwrap())
    }

    // Exhaustive scan recomputing each neighbour from scratch.
    fn brute_first(ind: &Individual) -> (Option<(usize, usize)>, u64) {
        let t = ind.table();
        let mut probes = 0;
        for y in 0..t.len() {
            for z in y + 1..t.len() {
                if t.get(y) == t.get(z) {
                    continue;
                }
                probes += 1;
                let nb = Individual::evaluate(t.swapped(y, z));
                if nb.fitness() == ind.fitness() + 2 {
                    return (Some((y, z)), probes);
                }
            }
        }
        (None, probes)
    }

    #[test]
    fn xor_matches_oracle() {
        let ind = Individual::evaluate(TruthTable::from_bits(&[0, 1, 1, 0]).unwrap());
        let got = two_improvement_first(&ind).map(|s| (s.y, s.z));
        assert_eq!(got, brute_first(&ind).0);
    }

    #[test]
    fn first_swap_and_probe_count_match_oracle() {
        let mut rng = SeededRng::new(5);
        for n in [3, 4, 5, 6] {
            for _ in 0..40 {
                let ind = random_balanced(n, &mut rng);
                let probe = probe_first_improvement(&ind);
                let (expected, probes) = brute_first(&ind);
                assert_eq!(probe.swap.map(|s| (s.y, s.z)), expected);
                assert_eq!(probe.probes, probes);
            }
        }
    }

    #[test]
    fn improvement_set_members_gain_two() {
        let mut rng = SeededRng::new(9);
        let ind = random_balanced(6, &mut rng);
        let set = two_improvement_set(&ind);
        for s in &set {
            assert_eq!(apply_swap(&ind, s.y, s.z).unwrap().fitness(), ind.fitness() + 2);
        }
        assert_eq!(set.first().copied(), two_improvement_first(&ind));
    }

    #[test]
    fn ls0_is_identity_and_free() {
        let mut rng = SeededRng::new(1);
        let ind = random_balanced(6, &mut rng);
        let mut counter = EvalCounter::new(100);
        let out = apply_policy(
            ind.clone(),
            LocalSearchPolicy::None,
            &mut counter,
            EvalCounting::AllProbes,
            |_, _| panic!("no steps expected"),
        );
        assert_eq!(out, ind);
        assert_eq!(counter.consumed(), 0);
    }

    #[test]
    fn ls1_gains_at_most_two() {
        let mut rng = SeededRng::new(2);
        for _ in 0..50 {
            let ind = random_balanced(6, &mut rng);
            let has = two_improvement_first(&ind).is_some();
            let mut counter = EvalCounter::unlimited();
            let out = apply_policy(
                ind.clone(),
                LocalSearchPolicy::SingleStep,
                &mut counter,
                EvalCounting::AppliedOnly,
                |_, _| {},
            );
            let expected = if has { ind.fitness() + 2 } else { ind.fitness() };
            assert_eq!(out.fitness(), expected);
            assert_eq!(counter.consumed(), has as u64);
            assert!(out.table().is_balanced());
        }
    }

    #[test]
    fn ls2_reaches_local_optimum_and_is_idempotent() {
        let mut rng = SeededRng::new(3);
        for _ in 0..20 {
            let ind = random_balanced(7, &mut rng);
            let mut counter = EvalCounter::unlimited();
            let mut steps = 0;
            let out = apply_policy(
                ind.clone(),
                LocalSearchPolicy::SteepestAscent,
                &mut counter,
                EvalCounting::AppliedOnly,
                |_, _| steps += 1,
            );
            assert!(two_improvement_first(&out).is_none());
            assert!(out.is_consistent());
            assert_eq!(out.fitness(), ind.fitness() + 2 * steps);
            let again = apply_policy(
                out.clone(),
                LocalSearchPolicy::SteepestAscent,
                &mut counter,
                EvalCounting::AppliedOnly,
                |_, _| {},
            );
            assert_eq!(again, out);
        }
    }

    #[test]
    fn budget_stops_search() {
        let mut rng = SeededRng::new(4);
        let ind = random_balanced(8, &mut rng);
        let mut counter = EvalCounter::new(1);
        let out = apply_policy(
            ind.clone(),
            LocalSearchPolicy::SteepestAscent,
            &mut counter,
            EvalCounting::AppliedOnly,
            |_, _| {},
        );
        assert!(out.fitness() <= ind.fitness() + 2);
        assert_eq!(counter.consumed(), 1);

        let mut counter = EvalCounter::new(3);
        apply_policy(
            ind,
            LocalSearchPolicy::SteepestAscent,
            &mut counter,
            EvalCounting::AllProbes,
            |_, _| {},
        );
        assert!(counter.consumed() <= 3);
    }

    #[test]
    fn all_probes_charges_scan_length() {
        let mut rng = SeededRng::new(6);
        let ind = random_balanced(5, &mut rng);
        let probe = probe_first_improvement(&ind);
        let mut counter = EvalCounter::unlimited();
        apply_policy(
            ind,
            LocalSearchPolicy::SingleStep,
            &mut counter,
            EvalCounting::AllProbes,
            |_, _| {},
        );
        assert_eq!(counter.consumed(), probe.probes);
    }

    #[test]
    fn policy_keys() {
        for p in LocalSearchPolicy::ALL {
            assert_eq!(p.key().parse::<LocalSearchPolicy>().unwrap(), p);
        }
        assert!("ls3".parse::<LocalSearchPolicy>().is_err());
    }
}
