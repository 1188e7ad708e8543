//! Alternative representations of balanced bitstrings.
//!
//! Positions are 0-based throughout. A balanced string of length `2m`
//! has `m` ones.

use crate::bits::BitString;
use crate::error::{Error, Result};

/// Run lengths of zeros: `runs[i]` zeros precede the `i`-th one and
/// `runs[m]` counts the trailing zeros. The entries sum to `m`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroLengthEncoding {
    runs: Vec<usize>,
}

impl ZeroLengthEncoding {
    /// Validates that `runs` has `m + 1` entries summing to `m`.
    pub fn new(runs: Vec<usize>) -> Result<Self> {
        if runs.is_empty() {
            return Err(Error::InvalidEncoding("zero-length vector is empty".into()));
        }
        let m = runs.len() - 1;
        let sum: usize = runs.iter().sum();
        if sum != m {
            return Err(Error::InvalidEncoding(format!(
                "zero-length entries sum to {sum}, expected {m}"
            )));
        }
        Ok(Self { runs })
    }

    pub fn half_length(&self) -> usize {
        self.runs.len() - 1
    }

    pub fn runs(&self) -> &[usize] {
        &self.runs
    }
}

/// Ascending positions of the ones.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MapOfOnes {
    half_length: usize,
    positions: Vec<usize>,
}

impl MapOfOnes {
    /// Accepts positions in any order; stores them sorted.
    pub fn new(half_length: usize, mut positions: Vec<usize>) -> Result<Self> {
        if positions.len() != half_length {
            return Err(Error::InvalidEncoding(format!(
                "map of ones has {} entries, expected {half_length}",
                positions.len()
            )));
        }
        positions.sort_unstable();
        if let Some(&p) = positions.iter().find(|&&p| p >= 2 * half_length) {
            return Err(Error::InvalidEncoding(format!(
                "position {p} out of range for length {}",
                2 * half_length
            )));
        }
        if positions.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidEncoding("duplicate positions in map of ones".into()));
        }
        Ok(Self {
            half_length,
            positions,
        })
    }

    pub fn half_length(&self) -> usize {
        self.half_length
    }

    pub fn positions(&self) -> &[usize] {
        &self.positions
    }
}

pub fn to_zero_length(bits: &BitString) -> Result<ZeroLengthEncoding> {
    bits.require_balanced()?;
    let mut runs = Vec::with_capacity(bits.len() / 2 + 1);
    let mut zeros = 0;
    for b in bits.iter() {
        if b {
            runs.push(zeros);
            zeros = 0;
        } else {
            zeros += 1;
        }
    }
    runs.push(zeros);
    Ok(ZeroLengthEncoding { runs })
}

pub fn from_zero_length(z: &ZeroLengthEncoding) -> BitString {
    let m = z.half_length();
    let mut out = BitString::zeros(2 * m);
    let mut pos = 0;
    for &run in &z.runs[..m] {
        pos += run;
        out.set(pos, true);
        pos += 1;
    }
    out
}

pub fn to_map_of_ones(bits: &BitString) -> Result<MapOfOnes> {
    bits.require_balanced()?;
    Ok(MapOfOnes {
        half_length: bits.len() / 2,
        positions: bits.ones(),
    })
}

pub fn from_map_of_ones(map: &MapOfOnes) -> BitString {
    let mut out = BitString::zeros(2 * map.half_length);
    for &p in &map.positions {
        out.set(p, true);
    }
    out
}
