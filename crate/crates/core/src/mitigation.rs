//! Post-processing of measured distributions: readout (SPAM) correction by
//! factor-wise transfer-matrix inversion, and the two bitstring discarding
//! schemes.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::distribution::{BitstringDistribution, Outcomes, ProbabilityDistribution};
use crate::error::{Error, Result};
use crate::graph::{cost_unchecked, CostParams, Graph};
use crate::noise::{apply_factorwise, DetectionModel};

/// Default Hamming radius by which the empirical support is widened before inversion.
pub const DEFAULT_EXPANSION_RADIUS: usize = 2;

/// Default fraction of shots kept by [`discard_fraction`].
pub const DEFAULT_KEEP_FRACTION: f64 = 0.8;

const DENSE_LIMIT_QUBITS: usize = 20;

/// Applies `⊗ M_i⁻¹` to a measured distribution.
///
/// The inverse is evaluated on the observed support closed under up to
/// `expansion_radius` bit flips (the whole space once that ball covers it).
/// Negative entries produced by finite sampling are clamped to zero and the
/// result renormalized.
pub fn spam_correct(
    dist: &impl Outcomes,
    model: &DetectionModel,
    expansion_radius: usize,
) -> Result<ProbabilityDistribution> {
    let n = dist.n_qubits();
    if model.n_qubits() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: model.n_qubits(),
        });
    }
    let inverses = (0..n)
        .map(|i| model.inverse_matrix(i))
        .collect::<Result<Vec<_>>>()?;
    let observed = dist.probabilities();
    if observed.is_empty() {
        return Err(Error::Domain("cannot correct an empty distribution".into()));
    }

    let corrected: Vec<(Bitstring, f64)> = if covers_whole_space(n, expansion_radius, observed.len()) {
        let mut dense = vec![0.0; 1usize << n];
        for (b, p) in &observed {
            dense[b.index() as usize] = *p;
        }
        apply_factorwise(&dense, &inverses)?
            .into_iter()
            .enumerate()
            .map(|(i, p)| (Bitstring::from_index(i as u128, n), p))
            .collect()
    } else {
        sparse_inverse(&observed, &inverses, expansion_radius)
    };

    let clamped = corrected.into_iter().map(|(b, p)| (b, p.max(0.0)));
    ProbabilityDistribution::from_weights(n, clamped, dist.n_shots())
}

fn covers_whole_space(n: usize, radius: usize, support: usize) -> bool {
    if n > DENSE_LIMIT_QUBITS {
        return false;
    }
    if radius >= n {
        return true;
    }
    let mut ball = 0u128;
    let mut binom = 1u128;
    for k in 0..=radius {
        ball += binom;
        binom = binom * (n - k) as u128 / (k + 1) as u128;
    }
    ball.saturating_mul(support as u128) >= 1u128 << n
}

fn sparse_inverse(
    observed: &[(Bitstring, f64)],
    inverses: &[[[f64; 2]; 2]],
    radius: usize,
) -> Vec<(Bitstring, f64)> {
    let n = inverses.len();
    let mut domain: HashSet<Bitstring> = observed.iter().map(|(b, _)| *b).collect();
    let mut frontier: Vec<Bitstring> = domain.iter().copied().collect();
    for _ in 0..radius {
        let mut next = Vec::new();
        for b in &frontier {
            for q in 0..n {
                let f = b.flipped(q);
                if domain.insert(f) {
                    next.push(f);
                }
            }
        }
        frontier = next;
    }

    let mut values: HashMap<Bitstring, f64> = domain.iter().map(|&b| (b, 0.0)).collect();
    for (b, p) in observed {
        values.insert(*b, *p);
    }
    for (q, m) in inverses.iter().enumerate() {
        let mut updated = HashMap::with_capacity(values.len());
        for &b in values.keys() {
            let zero = {
                let mut z = b;
                z.set(q, false);
                z
            };
            if updated.contains_key(&zero) || updated.contains_key(&zero.flipped(q)) {
                continue;
            }
            let one = zero.flipped(q);
            let a = values.get(&zero).copied().unwrap_or(0.0);
            let c = values.get(&one).copied().unwrap_or(0.0);
            if domain.contains(&zero) {
                updated.insert(zero, m[0][0] * a + m[0][1] * c);
            }
            if domain.contains(&one) {
                updated.insert(one, m[1][0] * a + m[1][1] * c);
            }
        }
        values = updated;
    }
    let mut out: Vec<_> = values.into_iter().collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Distributions the discarding schemes operate on.
pub trait Discard: Outcomes + Sized {
    /// Keeps the lowest-cost fraction `q` of the distribution.
    fn keep_lowest_cost(&self, q: f64, graph: &Graph, cost: &CostParams) -> Result<Self>;

    /// Keeps outcomes satisfying `keep`; `None` when nothing survives.
    fn retain(&self, keep: impl Fn(&Bitstring) -> bool) -> Option<Self>;
}

fn check_fraction(q: f64) -> Result<()> {
    if !(q > 0.0 && q <= 1.0) {
        return Err(Error::Domain(format!("keep fraction {q} is outside (0, 1]")));
    }
    Ok(())
}

fn check_graph(n: usize, graph: &Graph) -> Result<()> {
    if graph.n() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: graph.n(),
        });
    }
    Ok(())
}

/// Outcomes ordered by ascending cost, ties by bitstring.
fn by_cost<T>(entries: impl IntoIterator<Item = (Bitstring, T)>, graph: &Graph, cost: &CostParams) -> Vec<(Bitstring, T)> {
    let mut v: Vec<(f64, Bitstring, T)> = entries
        .into_iter()
        .map(|(b, t)| (cost_unchecked(&b, graph, cost), b, t))
        .collect();
    v.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
    v.into_iter().map(|(_, b, t)| (b, t)).collect()
}

impl Discard for BitstringDistribution {
    /// Retains the first `⌈q · n_shots⌉` shots in ascending cost order.
    fn keep_lowest_cost(&self, q: f64, graph: &Graph, cost: &CostParams) -> Result<Self> {
        check_fraction(q)?;
        check_graph(self.n_qubits(), graph)?;
        let total = self.total_shots();
        let keep = ((q * total as f64) - 1e-9).ceil().clamp(0.0, total as f64) as u64;
        let mut remaining = keep;
        let mut out = BitstringDistribution::empty(self.n_qubits());
        for (b, c) in by_cost(self.counts().iter().map(|(&b, &c)| (b, c)), graph, cost) {
            if remaining == 0 {
                break;
            }
            let take = c.min(remaining);
            out.record(b, take)?;
            remaining -= take;
        }
        Ok(out)
    }

    fn retain(&self, keep: impl Fn(&Bitstring) -> bool) -> Option<Self> {
        let kept: BTreeMap<Bitstring, u64> = self
            .counts()
            .iter()
            .filter(|(b, _)| keep(b))
            .map(|(&b, &c)| (b, c))
            .collect();
        if kept.is_empty() {
            return None;
        }
        BitstringDistribution::from_counts(self.n_qubits(), kept).ok()
    }
}

impl Discard for ProbabilityDistribution {
    /// Retains probability mass `q` in ascending cost order, splitting the
    /// boundary outcome.
    fn keep_lowest_cost(&self, q: f64, graph: &Graph, cost: &CostParams) -> Result<Self> {
        check_fraction(q)?;
        check_graph(self.n_qubits(), graph)?;
        let mut remaining = q;
        let mut kept = Vec::new();
        for (b, p) in by_cost(self.probabilities(), graph, cost) {
            if remaining <= 0.0 {
                break;
            }
            let take = p.min(remaining);
            kept.push((b, take));
            remaining -= take;
        }
        ProbabilityDistribution::from_weights(self.n_qubits(), kept, self.n_shots())
    }

    fn retain(&self, keep: impl Fn(&Bitstring) -> bool) -> Option<Self> {
        let kept: Vec<_> = self.probabilities().into_iter().filter(|(b, _)| keep(b)).collect();
        ProbabilityDistribution::from_weights(self.n_qubits(), kept, self.n_shots()).ok()
    }
}

/// Drops the highest-cost `1 − q` of the distribution and renormalizes.
pub fn discard_fraction<D: Discard>(dist: &D, q: f64, graph: &Graph, cost: &CostParams) -> Result<D> {
    dist.keep_lowest_cost(q, graph, cost)
}

/// Drops every outcome exciting both ends of an edge. `None` marks a
/// distribution emptied entirely.
pub fn discard_blockade_violators<D: Discard>(dist: &D, graph: &Graph) -> Result<Option<D>> {
    check_graph(dist.n_qubits(), graph)?;
    Ok(dist.retain(|b| graph.is_independent(b)))
}

/// Discarding scheme applied before the objective is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DiscardMode {
    #[default]
    None,
    Fraction,
    Blockade,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscardConfig {
    #[serde(default)]
    pub mode: DiscardMode,
    #[serde(default = "default_keep_fraction")]
    pub keep_fraction: f64,
}

fn default_keep_fraction() -> f64 {
    DEFAULT_KEEP_FRACTION
}

impl Default for DiscardConfig {
    fn default() -> Self {
        Self {
            mode: DiscardMode::None,
            keep_fraction: DEFAULT_KEEP_FRACTION,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MitigationConfig {
    #[serde(default)]
    pub discard: DiscardConfig,
    #[serde(default)]
    pub spam_correction: bool,
    #[serde(default = "default_radius")]
    pub expansion_radius: usize,
}

fn default_radius() -> usize {
    DEFAULT_EXPANSION_RADIUS
}

impl Default for MitigationConfig {
    fn default() -> Self {
        Self {
            discard: DiscardConfig::default(),
            spam_correction: false,
            expansion_radius: DEFAULT_EXPANSION_RADIUS,
        }
    }
}

impl MitigationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.discard.mode == DiscardMode::Fraction {
            check_fraction(self.discard.keep_fraction).map_err(|e| Error::Config(e.to_string()))?;
        }
        Ok(())
    }
}
