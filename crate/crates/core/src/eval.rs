//! Fitness-evaluation accounting.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// What a run charges against its evaluation budget.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EvalCounting {
    /// Fresh offspring transforms and applied local-search swaps.
    #[default]
    AppliedOnly,
    /// Fresh offspring transforms only; local search is free.
    OffspringOnly,
    /// Fresh offspring transforms and every swap probed by local search.
    AllProbes,
}

impl EvalCounting {
    pub fn key(self) -> &'static str {
        match self {
            EvalCounting::AppliedOnly => "applied-only",
            EvalCounting::OffspringOnly => "offspring-only",
            EvalCounting::AllProbes => "all-probes",
        }
    }
}

impl fmt::Display for EvalCounting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.key())
    }
}

impl FromStr for EvalCounting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "applied-only" => Ok(EvalCounting::AppliedOnly),
            "offspring-only" => Ok(EvalCounting::OffspringOnly),
            "all-probes" => Ok(EvalCounting::AllProbes),
            _ => Err(Error::Parse(format!(
                "unknown evaluation counting {s:?} (expected applied-only, offspring-only or all-probes)"
            ))),
        }
    }
}

/// Charged evaluations against a fixed budget. Never decreases.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalCounter {
    consumed: u64,
    budget: u64,
}

impl EvalCounter {
    pub fn new(budget: u64) -> Self {
        Self {
            consumed: 0,
            budget,
        }
    }

    /// A counter that never runs out.
    pub fn unlimited() -> Self {
        Self::new(u64::MAX)
    }

    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn remaining(&self) -> u64 {
        self.budget.saturating_sub(self.consumed)
    }

    pub fn exhausted(&self) -> bool {
        self.consumed >= self.budget
    }

    pub fn charge(&mut self, k: u64) {
        self.consumed = self.consumed.saturating_add(k);
    }
}
