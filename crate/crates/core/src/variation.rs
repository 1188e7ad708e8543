//! Balancedness-preserving crossovers and the swap mutation.
//!
//! Each crossover draws one fair coin per coordinate (`true` picks the first
//! parent). The map-of-ones repair additionally draws one integer when both
//! parents' values are already taken.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bits::BitString;
use crate::encodings::{from_zero_length, to_map_of_ones, to_zero_length, ZeroLengthEncoding};
use crate::error::{Error, Result};
use crate::rng::RandomSource;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Crossover {
    /// Counter-based, left to right.
    #[serde(rename = "cx1")]
    CounterBased,
    /// Zero-length encoding.
    #[serde(rename = "cx2")]
    ZeroLength,
    /// Map of ones.
    #[serde(rename = "cx3")]
    MapOfOnes,
}

impl Crossover {
    pub const ALL: [Crossover; 3] = [
        Crossover::CounterBased,
        Crossover::ZeroLength,
        Crossover::MapOfOnes,
    ];

    pub fn key(self) -> &'static str {
        match self {
            Crossover::CounterBased => "cx1",
            Crossover::ZeroLength => "cx2",
            Crossover::MapOfOnes => "cx3",
        }
    }

    pub fn apply<R: RandomSource + ?Sized>(
        self,
        p1: &BitString,
        p2: &BitString,
        rng: &mut R,
    ) -> Result<BitString> {
        match self {
            Crossover::CounterBased => counter_based_crossover(p1, p2, rng),
            Crossover::ZeroLength => zero_length_crossover(p1, p2, rng),
            Crossover::MapOfOnes => map_of_ones_crossover(p1, p2, rng),
        }
    }
}

impl fmt::Display for Crossover {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for Crossover {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "cx1" => Ok(Crossover::CounterBased),
            "cx2" => Ok(Crossover::ZeroLength),
            "cx3" => Ok(Crossover::MapOfOnes),
            _ => Err(Error::Parse(format!(
                "unknown crossover {s:?} (expected cx1, cx2 or cx3)"
            ))),
        }
    }
}

fn check_parents(p1: &BitString, p2: &BitString) -> Result<()> {
    if p1.len() != p2.len() {
        return Err(Error::LengthMismatch {
            expected: p1.len(),
            actual: p2.len(),
        });
    }
    p1.require_balanced()?;
    p2.require_balanced()
}

/// Copies each bit from a random parent, counting zeros and ones; once
/// either count reaches `m` the rest is filled with the other value.
pub fn counter_based_crossover<R: RandomSource + ?Sized>(
    p1: &BitString,
    p2: &BitString,
    rng: &mut R,
) -> Result<BitString> {
    check_parents(p1, p2)?;
    let len = p1.len();
    let m = len / 2;
    let mut child = BitString::zeros(len);
    let (mut zeros, mut ones) = (0, 0);
    for i in 0..len {
        let bit = if rng.bit() { p1.get(i) } else { p2.get(i) };
        child.set(i, bit);
        if bit {
            ones += 1;
        } else {
            zeros += 1;
        }
        if zeros == m || ones == m {
            let fill = zeros == m;
            for j in i + 1..len {
                child.set(j, fill);
            }
            break;
        }
    }
    debug_assert!(child.is_balanced());
    Ok(child)
}

/// Coordinate-wise recombination of the zero-length encodings. A value that
/// would push the running sum past `m` is clamped; once the sum reaches `m`
/// the remaining runs are zero, otherwise the last run absorbs the rest.
pub fn zero_length_crossover<R: RandomSource + ?Sized>(
    p1: &BitString,
    p2: &BitString,
    rng: &mut R,
) -> Result<BitString> {
    check_parents(p1, p2)?;
    let r1 = to_zero_length(p1)?;
    let r2 = to_zero_length(p2)?;
    let m = r1.half_length();
    let mut runs = vec![0; m + 1];
    let mut acc = 0;
    for i in 0..m {
        if acc == m {
            break;
        }
        let v = if rng.bit() { r1.runs()[i] } else { r2.runs()[i] };
        let v = v.min(m - acc);
        runs[i] = v;
        acc += v;
    }
    runs[m] = m - acc;
    Ok(from_zero_length(&ZeroLengthEncoding::new(runs)?))
}

/// Coordinate-wise recombination of the maps of ones without duplicates.
/// A taken value falls back to the other parent's; if both are taken a
/// uniformly random free position is used.
pub fn map_of_ones_crossover<R: RandomSource + ?Sized>(
    p1: &BitString,
    p2: &BitString,
    rng: &mut R,
) -> Result<BitString> {
    check_parents(p1, p2)?;
    let b1 = to_map_of_ones(p1)?;
    let b2 = to_map_of_ones(p2)?;
    let len = p1.len();
    let mut child = BitString::zeros(len);
    let mut placed = 0;
    for (&v1, &v2) in b1.positions().iter().zip(b2.positions()) {
        let (pick, other) = if rng.bit() { (v1, v2) } else { (v2, v1) };
        let pos = if !child.get(pick) {
            pick
        } else if !child.get(other) {
            other
        } else {
            let k = rng.below(len - placed);
            nth_free(&child, k)
        };
        child.set(pos, true);
        placed += 1;
    }
    debug_assert!(child.is_balanced());
    Ok(child)
}

fn nth_free(bits: &BitString, k: usize) -> usize {
    (0..bits.len())
        .filter(|&i| !bits.get(i))
        .nth(k)
        .expect("fewer free positions than requested")
}

/// Exchanges one uniformly chosen one with one uniformly chosen zero.
/// Draws the one's rank first, then the zero's.
pub fn swap_mutation<R: RandomSource + ?Sized>(t: &BitString, rng: &mut R) -> Result<BitString> {
    let ones = t.ones();
    let zeros = t.zeros_positions();
    if ones.is_empty() || zeros.is_empty() {
        return Err(Error::InvalidEncoding(
            "cannot swap-mutate a constant string".into(),
        ));
    }
    let i = ones[rng.below(ones.len())];
    let j = zeros[rng.below(zeros.len())];
    let mut out = t.clone();
    out.swap(i, j);
    Ok(out)
}
