//! Fixed-width measurement outcomes.
//!
//! Bit `i` of a [`Bitstring`] is the state of qubit (vertex) `i`: `1` means the
//! atom was found in the Rydberg state, i.e. the vertex belongs to the set.
//! The textual form lists qubit 0 first, so `"100"` has only qubit 0 excited.
//! Basis-state indices of a state vector use the same little-endian layout.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const MAX_BITS: usize = 128;

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bitstring {
    word: u128,
    len: u16,
}

impl Bitstring {
    pub fn zeros(len: usize) -> Self {
        assert!(len <= MAX_BITS, "bitstrings hold at most {MAX_BITS} bits");
        Self {
            word: 0,
            len: len as u16,
        }
    }

    /// Builds a bitstring from a basis-state index (bit `i` of `index` is qubit `i`).
    pub fn from_index(index: u128, len: usize) -> Self {
        assert!(len <= MAX_BITS, "bitstrings hold at most {MAX_BITS} bits");
        let mask = if len == MAX_BITS {
            u128::MAX
        } else {
            (1u128 << len) - 1
        };
        Self {
            word: index & mask,
            len: len as u16,
        }
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let mut out = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            out.set(i, b);
        }
        out
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn index(&self) -> u128 {
        self.word
    }

    pub fn get(&self, i: usize) -> bool {
        debug_assert!(i < self.len());
        (self.word >> i) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len(), "bit {i} out of range for length {}", self.len);
        if value {
            self.word |= 1 << i;
        } else {
            self.word &= !(1 << i);
        }
    }

    pub fn flipped(mut self, i: usize) -> Self {
        assert!(i < self.len(), "bit {i} out of range for length {}", self.len);
        self.word ^= 1 << i;
        self
    }

    pub fn count_ones(&self) -> usize {
        self.word.count_ones() as usize
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&i| self.get(i))
    }

    pub fn hamming_distance(&self, other: &Bitstring) -> usize {
        (self.word ^ other.word).count_ones() as usize
    }

    /// Scatters `self` (a string over a sub-register) back onto `len` qubits.
    /// `sites[k]` is the full-register position of local qubit `k`.
    pub fn embed(&self, sites: &[usize], len: usize) -> Bitstring {
        debug_assert_eq!(sites.len(), self.len());
        let mut out = Bitstring::zeros(len);
        for (k, &site) in sites.iter().enumerate() {
            if self.get(k) {
                out.set(site, true);
            }
        }
        out
    }

    fn lexicographic_key(&self) -> u128 {
        // qubit 0 is the most significant character of the textual form
        if self.len == 0 {
            0
        } else {
            self.word.reverse_bits() >> (MAX_BITS - self.len())
        }
    }
}

impl Ord for Bitstring {
    /// Lexicographic order of the textual form (`'0' < '1'`, qubit 0 first).
    fn cmp(&self, other: &Self) -> Ordering {
        self.len
            .cmp(&other.len)
            .then_with(|| self.lexicographic_key().cmp(&other.lexicographic_key()))
    }
}

impl PartialOrd for Bitstring {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len() {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bitstring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bitstring({self})")
    }
}

impl FromStr for Bitstring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() > MAX_BITS {
            return Err(Error::TooLarge {
                what: "bitstring",
                size: s.len(),
                max: MAX_BITS,
            });
        }
        let mut out = Bitstring::zeros(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => out.set(i, true),
                other => {
                    return Err(Error::Domain(format!(
                        "invalid character {other:?} in bitstring {s:?}"
                    )))
                }
            }
        }
        Ok(out)
    }
}

impl Serialize for Bitstring {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bitstring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
