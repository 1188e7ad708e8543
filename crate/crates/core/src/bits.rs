//! Packed bit vectors.
//!
//! Bit `i` lives in word `i / 64` at bit position `i % 64`. Unused high bits
//! of the last word are always zero, so word-wise popcounts need no masking.

use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitString {
    len: usize,
    words: Vec<u64>,
}

impl BitString {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(64)],
        }
    }

    pub fn from_bools<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % 64 == 0 {
                words.push(0);
            }
            if b {
                words[len / 64] |= 1 << (len % 64);
            }
            len += 1;
        }
        Self { len, words }
    }

    /// Builds a bitstring from 0/1 integers; any nonzero value counts as one.
    pub fn from_bits(bits: &[u8]) -> Self {
        Self::from_bools(bits.iter().map(|&b| b != 0))
    }

    /// Parses a string of `0` and `1` characters.
    pub fn from_binary_str(s: &str) -> Result<Self> {
        let mut out = Vec::with_capacity(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => out.push(false),
                '1' => out.push(true),
                _ => return Err(Error::Parse(format!("unexpected character {c:?} at {i}"))),
            }
        }
        Ok(Self::from_bools(out))
    }

    pub fn to_binary_string(&self) -> String {
        self.iter().map(|b| if b { '1' } else { '0' }).collect()
    }

    /// Hexadecimal form: bit 0 is the most significant bit of the first
    /// digit. A trailing partial nibble is padded with zero bits.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        let mut s = String::with_capacity(digits);
        for d in 0..digits {
            let mut nibble = 0u32;
            for k in 0..4 {
                let i = 4 * d + k;
                nibble <<= 1;
                if i < self.len && self.get(i) {
                    nibble |= 1;
                }
            }
            s.push(char::from_digit(nibble, 16).unwrap());
        }
        s
    }

    /// Inverse of [`BitString::to_hex`] for a known bit length. Padding bits
    /// must be zero.
    pub fn from_hex(s: &str, len: usize) -> Result<Self> {
        let digits = len.div_ceil(4);
        if s.len() != digits {
            return Err(Error::Parse(format!(
                "expected {digits} hex digits for {len} bits, got {}",
                s.len()
            )));
        }
        let mut out = Self::zeros(len);
        for (d, c) in s.chars().enumerate() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| Error::Parse(format!("invalid hex digit {c:?}")))?;
            for k in 0..4 {
                let bit = (nibble >> (3 - k)) & 1 == 1;
                let i = 4 * d + k;
                if i < len {
                    out.set(i, bit);
                } else if bit {
                    return Err(Error::Parse("nonzero padding bits in hex string".into()));
                }
            }
        }
        Ok(out)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len);
        (self.words[i / 64] >> (i % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        debug_assert!(i < self.len);
        let mask = 1u64 << (i % 64);
        if value {
            self.words[i / 64] |= mask;
        } else {
            self.words[i / 64] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        debug_assert!(i < self.len);
        self.words[i / 64] ^= 1u64 << (i % 64);
    }

    /// Exchanges the values at positions `i` and `j`.
    pub fn swap(&mut self, i: usize, j: usize) {
        let (a, b) = (self.get(i), self.get(j));
        self.set(i, b);
        self.set(j, a);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_balanced(&self) -> bool {
        self.len % 2 == 0 && self.weight() == self.len / 2
    }

    /// Number of differing positions. Lengths must match.
    pub fn hamming_distance(&self, other: &Self) -> Result<usize> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                expected: self.len,
                actual: other.len,
            });
        }
        Ok(self
            .words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a ^ b).count_ones() as usize)
            .sum())
    }

    pub fn complement(&self) -> Self {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.clear_padding();
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Positions holding a one, ascending.
    pub fn ones(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| self.get(i)).collect()
    }

    /// Positions holding a zero, ascending.
    pub fn zeros_positions(&self) -> Vec<usize> {
        (0..self.len).filter(|&i| !self.get(i)).collect()
    }

    /// Rejects strings that are not balanced.
    pub fn require_balanced(&self) -> Result<()> {
        if self.is_balanced() {
            Ok(())
        } else {
            Err(Error::Unbalanced {
                len: self.len,
                weight: self.weight(),
                expected: self.len / 2,
            })
        }
    }

    fn clear_padding(&mut self) {
        let rem = self.len % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }
}

impl fmt::Debug for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitString({})", self.to_binary_string())
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_binary_string())
    }
}
