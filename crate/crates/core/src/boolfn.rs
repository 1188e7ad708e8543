//! Boolean functions, their Walsh spectra and nonlinearity.
//!
//! Input vectors are indexed `0..2^n` in lexicographic order, so index `x`
//! read as an `n`-bit big-endian word is the vector `(x1, ..., xn)`. The
//! scalar product `a·x` is the parity of `a & x`.

use crate::bits::BitString;
use crate::error::{Error, Result};

pub const MAX_VARIABLES: u32 = 16;

/// Scalar product over F2 of two index words.
#[inline]
pub fn dot(a: usize, x: usize) -> u32 {
    (a & x).count_ones() & 1
}

/// `(-1)^(a·x)`
#[inline]
fn character(a: usize, x: usize) -> i32 {
    1 - 2 * dot(a, x) as i32
}

/// Truth table of an `n`-variable Boolean function.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TruthTable {
    n: u32,
    bits: BitString,
}

impl TruthTable {
    pub fn new(n: u32, bits: BitString) -> Result<Self> {
        check_variables(n)?;
        let expected = 1usize << n;
        if bits.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                actual: bits.len(),
            });
        }
        Ok(Self { n, bits })
    }

    /// Builds a table from 0/1 values; the variable count is inferred from
    /// the length, which must be a power of two.
    pub fn from_bits(bits: &[u8]) -> Result<Self> {
        let len = bits.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::Parse(format!(
                "truth table length {len} is not a power of two >= 2"
            )));
        }
        Self::new(len.trailing_zeros(), BitString::from_bits(bits))
    }

    pub fn zeros(n: u32) -> Result<Self> {
        check_variables(n)?;
        Ok(Self {
            n,
            bits: BitString::zeros(1 << n),
        })
    }

    /// Evaluates `f` on every input index.
    pub fn from_fn(n: u32, f: impl Fn(usize) -> bool) -> Result<Self> {
        check_variables(n)?;
        Ok(Self {
            n,
            bits: BitString::from_bools((0..1usize << n).map(f)),
        })
    }

    pub fn from_hex(n: u32, s: &str) -> Result<Self> {
        check_variables(n)?;
        Self::new(n, BitString::from_hex(s, 1 << n)?)
    }

    pub fn from_binary_str(s: &str) -> Result<Self> {
        let bits = BitString::from_binary_str(s)?;
        let len = bits.len();
        if !len.is_power_of_two() || len < 2 {
            return Err(Error::Parse(format!(
                "truth table length {len} is not a power of two >= 2"
            )));
        }
        Self::new(len.trailing_zeros(), bits)
    }

    pub fn to_hex(&self) -> String {
        self.bits.to_hex()
    }

    pub fn to_binary_string(&self) -> String {
        self.bits.to_binary_string()
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn get(&self, x: usize) -> bool {
        self.bits.get(x)
    }

    pub fn bits(&self) -> &BitString {
        &self.bits
    }

    pub fn into_bits(self) -> BitString {
        self.bits
    }

    pub fn weight(&self) -> usize {
        self.bits.weight()
    }

    /// Weight exactly `2^(n-1)`.
    pub fn is_balanced(&self) -> bool {
        self.bits.is_balanced()
    }

    pub fn complement(&self) -> Self {
        Self {
            n: self.n,
            bits: self.bits.complement(),
        }
    }

    /// Returns the table with positions `y` and `z` exchanged.
    pub fn swapped(&self, y: usize, z: usize) -> Self {
        let mut out = self.clone();
        out.bits.swap(y, z);
        out
    }
}

fn check_variables(n: u32) -> Result<()> {
    if (1..=MAX_VARIABLES).contains(&n) {
        Ok(())
    } else {
        Err(Error::InvalidVariableCount(n))
    }
}

/// Walsh coefficients `W_f(a)` for every `a`, indexed like the truth table.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct WalshSpectrum {
    n: u32,
    coeffs: Vec<i32>,
}

impl WalshSpectrum {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn coeffs(&self) -> &[i32] {
        &self.coeffs
    }

    pub fn get(&self, a: usize) -> i32 {
        self.coeffs[a]
    }

    pub fn max_abs(&self) -> i32 {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or(0)
    }

    /// `Σ_a W(a)^2`; equals `2^(2n)` for any Boolean function.
    pub fn parseval_sum(&self) -> i64 {
        self.coeffs.iter().map(|&c| i64::from(c) * i64::from(c)).sum()
    }

    /// Adds `delta` coefficient-wise.
    pub fn add(&mut self, delta: &[i32]) {
        debug_assert_eq!(delta.len(), self.coeffs.len());
        for (c, d) in self.coeffs.iter_mut().zip(delta) {
            *c += d;
        }
    }
}

/// Walsh transform by direct double summation, `O(4^n)`.
pub fn walsh_naive(table: &TruthTable) -> WalshSpectrum {
    let size = table.len();
    let coeffs = (0..size)
        .map(|a| {
            (0..size)
                .map(|x| {
                    if (table.get(x) as u32 ^ dot(a, x)) == 0 {
                        1
                    } else {
                        -1
                    }
                })
                .sum()
        })
        .collect();
    WalshSpectrum {
        n: table.n(),
        coeffs,
    }
}

/// Walsh transform by the in-place butterfly, `O(n 2^n)`.
pub fn walsh_fast(table: &TruthTable) -> WalshSpectrum {
    let size = table.len();
    let mut v: Vec<i32> = (0..size)
        .map(|x| if table.get(x) { -1 } else { 1 })
        .collect();
    let mut h = 1;
    while h < size {
        for block in v.chunks_exact_mut(2 * h) {
            let (lo, hi) = block.split_at_mut(h);
            for (u, w) in lo.iter_mut().zip(hi.iter_mut()) {
                let (s, d) = (*u + *w, *u - *w);
                *u = s;
                *w = d;
            }
        }
        h *= 2;
    }
    WalshSpectrum {
        n: table.n(),
        coeffs: v,
    }
}

/// `2^(n-1) - max_a |W(a)| / 2`
pub fn nonlinearity(spectrum: &WalshSpectrum) -> u32 {
    let half = 1i32 << (spectrum.n - 1);
    (half - spectrum.max_abs() / 2) as u32
}

fn check_swap(table: &TruthTable, y: usize, z: usize) -> Result<()> {
    for index in [y, z] {
        if index >= table.len() {
            return Err(Error::IndexOutOfRange {
                index,
                len: table.len(),
            });
        }
    }
    if table.get(y) == table.get(z) {
        return Err(Error::MeaninglessSwap { y, z });
    }
    Ok(())
}

/// Change of every Walsh coefficient caused by exchanging `f(y)` and `f(z)`.
///
/// Uses `Δ(a) = 2 (-1)^f(y) [(-1)^(a·z) - (-1)^(a·y)]`, which equals the
/// two-bracket form whenever `f(y) != f(z)`. Every entry is in `{-4, 0, 4}`.
pub fn swap_delta(table: &TruthTable, y: usize, z: usize) -> Result<Vec<i32>> {
    check_swap(table, y, z)?;
    Ok(swap_delta_unchecked(table.len(), table.get(y), y, z))
}

#[inline]
pub(crate) fn swap_delta_unchecked(size: usize, fy: bool, y: usize, z: usize) -> Vec<i32> {
    let sign = if fy { -2 } else { 2 };
    (0..size)
        .map(|a| sign * (character(a, z) - character(a, y)))
        .collect()
}

/// A truth table together with its spectrum and nonlinearity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Individual {
    table: TruthTable,
    spectrum: WalshSpectrum,
    fitness: u32,
}

impl Individual {
    /// Evaluates `table` with the fast transform.
    pub fn evaluate(table: TruthTable) -> Self {
        let spectrum = walsh_fast(&table);
        let fitness = nonlinearity(&spectrum);
        Self {
            table,
            spectrum,
            fitness,
        }
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    pub fn into_table(self) -> TruthTable {
        self.table
    }

    pub fn spectrum(&self) -> &WalshSpectrum {
        &self.spectrum
    }

    pub fn fitness(&self) -> u32 {
        self.fitness
    }

    /// True when the cached spectrum matches a fresh transform.
    pub fn is_consistent(&self) -> bool {
        let fresh = walsh_fast(&self.table);
        fresh == self.spectrum && nonlinearity(&fresh) == self.fitness
    }
}

/// Exchanges `f(y)` and `f(z)`, updating the spectrum incrementally.
pub fn apply_swap(ind: &Individual, y: usize, z: usize) -> Result<Individual> {
    let mut out = ind.clone();
    apply_swap_in_place(&mut out, y, z)?;
    Ok(out)
}

pub(crate) fn apply_swap_in_place(ind: &mut Individual, y: usize, z: usize) -> Result<()> {
    let delta = swap_delta(&ind.table, y, z)?;
    ind.table.bits.swap(y, z);
    ind.spectrum.add(&delta);
    ind.fitness = nonlinearity(&ind.spectrum);
    Ok(())
}

pub fn hamming_distance(t1: &TruthTable, t2: &TruthTable) -> Result<usize> {
    if t1.n() != t2.n() {
        return Err(Error::LengthMismatch {
            expected: t1.len(),
            actual: t2.len(),
        });
    }
    t1.bits.hamming_distance(&t2.bits)
}
