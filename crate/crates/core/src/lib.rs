//! Balanced genetic algorithms with Walsh-spectrum local search for
//! evolving highly nonlinear balanced Boolean functions.
//!
//! The crate covers the representation ([`boolfn`], [`encodings`]), the
//! balancedness-preserving operators ([`variation`]), swap-based local
//! search ([`local_search`]), the steady-state GA ([`ga`]) and the
//! post-run statistics ([`analysis`]).

pub mod analysis;
pub mod bits;
pub mod boolfn;
pub mod encodings;
mod error;
pub mod eval;
pub mod ga;
pub mod local_search;
pub mod rng;
pub mod variation;

pub use bits::BitString;
pub use boolfn::{
    apply_swap, hamming_distance, nonlinearity, swap_delta, walsh_fast, walsh_naive, Individual,
    TruthTable, WalshSpectrum,
};
pub use error::{Error, Result};
pub use eval::{EvalCounter, EvalCounting};
pub use ga::{run_ga, GaConfig, RunRecord};
pub use local_search::{apply_policy, two_improvement_first, LocalSearchPolicy, SwapCandidate};
pub use rng::{RandomSource, SeededRng};
pub use variation::Crossover;
