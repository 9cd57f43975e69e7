//! Measurement outcome distributions.
//!
//! [`BitstringDistribution`] is an empirical histogram of shots.
//! [`ProbabilityDistribution`] carries real-valued weights: exact Born
//! probabilities from a state vector, or the output of readout correction.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::error::{Error, Result};

/// Read-only view shared by both distribution kinds.
pub trait Outcomes {
    fn n_qubits(&self) -> usize;

    /// Number of shots behind the distribution, when it came from sampling.
    fn n_shots(&self) -> Option<u64>;

    /// Normalized `(bitstring, probability)` pairs over the support, sorted by bitstring.
    fn probabilities(&self) -> Vec<(Bitstring, f64)>;
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BitstringDistribution {
    n_qubits: usize,
    n_shots: u64,
    counts: BTreeMap<Bitstring, u64>,
}

impl BitstringDistribution {
    pub fn empty(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            n_shots: 0,
            counts: BTreeMap::new(),
        }
    }

    pub fn from_shots(n_qubits: usize, shots: impl IntoIterator<Item = Bitstring>) -> Result<Self> {
        let mut out = Self::empty(n_qubits);
        for shot in shots {
            out.record(shot, 1)?;
        }
        Ok(out)
    }

    pub fn from_counts(
        n_qubits: usize,
        counts: impl IntoIterator<Item = (Bitstring, u64)>,
    ) -> Result<Self> {
        let mut out = Self::empty(n_qubits);
        for (b, c) in counts {
            out.record(b, c)?;
        }
        Ok(out)
    }

    pub fn record(&mut self, shot: Bitstring, count: u64) -> Result<()> {
        if shot.len() != self.n_qubits {
            return Err(Error::LengthMismatch {
                expected: self.n_qubits,
                found: shot.len(),
            });
        }
        if count > 0 {
            *self.counts.entry(shot).or_insert(0) += count;
            self.n_shots += count;
        }
        Ok(())
    }

    pub fn total_shots(&self) -> u64 {
        self.n_shots
    }

    pub fn is_empty(&self) -> bool {
        self.n_shots == 0
    }

    pub fn counts(&self) -> &BTreeMap<Bitstring, u64> {
        &self.counts
    }

    pub fn count(&self, b: &Bitstring) -> u64 {
        self.counts.get(b).copied().unwrap_or(0)
    }

    pub fn probability(&self, b: &Bitstring) -> f64 {
        if self.n_shots == 0 {
            0.0
        } else {
            self.count(b) as f64 / self.n_shots as f64
        }
    }

    pub fn distinct(&self) -> usize {
        self.counts.len()
    }

    /// Expands the histogram back into a shot list, in bitstring order.
    pub fn shots(&self) -> Vec<Bitstring> {
        self.counts
            .iter()
            .flat_map(|(&b, &c)| std::iter::repeat_n(b, c as usize))
            .collect()
    }

    pub fn to_probabilities(&self) -> ProbabilityDistribution {
        ProbabilityDistribution {
            n_qubits: self.n_qubits,
            n_shots: Some(self.n_shots),
            probs: self
                .counts
                .iter()
                .map(|(&b, &c)| (b, c as f64 / self.n_shots as f64))
                .collect(),
        }
    }

    /// A copy with one shot of `b` removed; used by leave-one-out resampling.
    pub fn without_one(&self, b: &Bitstring) -> Self {
        let mut out = self.clone();
        if let Some(c) = out.counts.get_mut(b) {
            *c -= 1;
            out.n_shots -= 1;
            if *c == 0 {
                out.counts.remove(b);
            }
        }
        out
    }
}

impl Outcomes for BitstringDistribution {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn n_shots(&self) -> Option<u64> {
        Some(self.n_shots)
    }

    fn probabilities(&self) -> Vec<(Bitstring, f64)> {
        let n = self.n_shots as f64;
        self.counts.iter().map(|(&b, &c)| (b, c as f64 / n)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityDistribution {
    n_qubits: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    n_shots: Option<u64>,
    probs: BTreeMap<Bitstring, f64>,
}

impl ProbabilityDistribution {
    /// Normalizes the given non-negative weights; zero weights are dropped.
    pub fn from_weights(
        n_qubits: usize,
        weights: impl IntoIterator<Item = (Bitstring, f64)>,
        n_shots: Option<u64>,
    ) -> Result<Self> {
        let mut probs = BTreeMap::new();
        for (b, w) in weights {
            if b.len() != n_qubits {
                return Err(Error::LengthMismatch {
                    expected: n_qubits,
                    found: b.len(),
                });
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(Error::Domain(format!("invalid probability weight {w} for {b}")));
            }
            if w > 0.0 {
                *probs.entry(b).or_insert(0.0) += w;
            }
        }
        let total: f64 = probs.values().sum();
        if !(total > 0.0) {
            return Err(Error::Domain("distribution has no probability mass".into()));
        }
        for p in probs.values_mut() {
            *p /= total;
        }
        Ok(Self {
            n_qubits,
            n_shots,
            probs,
        })
    }

    /// From a dense vector indexed by basis state.
    pub fn from_dense(probs: &[f64], n_qubits: usize) -> Result<Self> {
        if probs.len() != 1usize << n_qubits {
            return Err(Error::LengthMismatch {
                expected: 1 << n_qubits,
                found: probs.len(),
            });
        }
        Self::from_weights(
            n_qubits,
            probs
                .iter()
                .enumerate()
                .map(|(i, &p)| (Bitstring::from_index(i as u128, n_qubits), p)),
            None,
        )
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; 1usize << self.n_qubits];
        for (b, &p) in &self.probs {
            out[b.index() as usize] = p;
        }
        out
    }

    pub fn probability(&self, b: &Bitstring) -> f64 {
        self.probs.get(b).copied().unwrap_or(0.0)
    }

    pub fn support(&self) -> &BTreeMap<Bitstring, f64> {
        &self.probs
    }

    pub fn with_shots(mut self, n_shots: Option<u64>) -> Self {
        self.n_shots = n_shots;
        self
    }
}

impl Outcomes for ProbabilityDistribution {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn n_shots(&self) -> Option<u64> {
        self.n_shots
    }

    fn probabilities(&self) -> Vec<(Bitstring, f64)> {
        self.probs.iter().map(|(&b, &p)| (b, p)).collect()
    }
}
