//! Injected randomness. Every stochastic operator takes a [`RandomSource`]
//! explicitly so runs are reproducible from a seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub trait RandomSource {
    /// Fair coin.
    fn bit(&mut self) -> bool;
    /// Uniform integer in `0..bound`; `bound` must be positive.
    fn below(&mut self, bound: usize) -> usize;
    /// True with probability `p`.
    fn chance(&mut self, p: f64) -> bool;
}

/// Seeded ChaCha8 stream. Output is identical across platforms.
#[derive(Clone, Debug)]
pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub const IDENTIFIER: &'static str = "chacha8";

    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }
}

impl RandomSource for SeededRng {
    fn bit(&mut self) -> bool {
        self.inner.random()
    }

    fn below(&mut self, bound: usize) -> usize {
        assert!(bound > 0, "empty range");
        self.inner.random_range(0..bound as u64) as usize
    }

    fn chance(&mut self, p: f64) -> bool {
        // 53-bit uniform in [0, 1)
        let u = (self.inner.random::<u64>() >> 11) as f64 / (1u64 << 53) as f64;
        u < p
    }
}

impl<R: RandomSource + ?Sized> RandomSource for &mut R {
    fn bit(&mut self) -> bool {
        (**self).bit()
    }
    fn below(&mut self, bound: usize) -> usize {
        (**self).below(bound)
    }
    fn chance(&mut self, p: f64) -> bool {
        (**self).chance(p)
    }
}

/// Fisher-Yates shuffle driven by a [`RandomSource`].
pub fn shuffle<T, R: RandomSource + ?Sized>(items: &mut [T], rng: &mut R) {
    for i in (1..items.len()).rev() {
        let j = rng.below(i + 1);
        items.swap(i, j);
    }
}

/// Replays scripted draws; used to drive operators through hand traces.
#[cfg(test)]
#[derive(Debug, Default)]
pub(crate) struct Scripted {
    pub bits: std::collections::VecDeque<bool>,
    pub ints: std::collections::VecDeque<usize>,
    pub chances: std::collections::VecDeque<bool>,
}

#[cfg(test)]
impl Scripted {
    pub fn with_bits(bits: &[bool]) -> Self {
        Self {
            bits: bits.iter().copied().collect(),
            ..Default::default()
        }
    }
}

#[cfg(test)]
impl RandomSource for Scripted {
    fn bit(&mut self) -> bool {
        self.bits.pop_front().expect("script ran out of bits")
    }
    fn below(&mut self, bound: usize) -> usize {
        let v = self.ints.pop_front().expect("script ran out of integers");
        assert!(v < bound);
        v
    }
    fn chance(&mut self, _p: f64) -> bool {
        self.chances.pop_front().expect("script ran out of chances")
    }
}
