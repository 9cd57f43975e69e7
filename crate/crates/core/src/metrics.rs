//! Figures of merit for how close a measured distribution is to the MIS.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::distribution::{BitstringDistribution, Outcomes};
use crate::error::{Error, Result};
use crate::graph::{cost_unchecked, CostParams, Graph, MisSolution};
use crate::mitigation::{discard_fraction, Discard};

/// Total probability on MIS bitstrings.
pub fn fidelity(dist: &impl Outcomes, mis: &MisSolution) -> Result<f64> {
    if mis.solutions.is_empty() {
        return Err(Error::Domain("the MIS solution set is empty".into()));
    }
    Ok(dist
        .probabilities()
        .iter()
        .filter(|(b, _)| mis.contains(b))
        .map(|(_, p)| p)
        .sum())
}

/// Mean classical cost under the distribution.
pub fn mean_cost(dist: &impl Outcomes, graph: &Graph, cost: &CostParams) -> Result<f64> {
    if dist.n_qubits() != graph.n() {
        return Err(Error::LengthMismatch {
            expected: graph.n(),
            found: dist.n_qubits(),
        });
    }
    Ok(dist
        .probabilities()
        .iter()
        .map(|(b, p)| p * cost_unchecked(b, graph, cost))
        .sum())
}

/// `R = −E / |S*|` with `E` the mean classical cost.
pub fn approximation_ratio(
    dist: &impl Outcomes,
    graph: &Graph,
    cost: &CostParams,
    mis_size: usize,
) -> Result<f64> {
    if mis_size == 0 {
        return Err(Error::Domain("MIS size must be positive".into()));
    }
    Ok(-mean_cost(dist, graph, cost)? / mis_size as f64)
}

/// Approximation ratio after keeping only the lowest-cost fraction `q`.
pub fn truncated_ratio<D: Discard>(
    dist: &D,
    graph: &Graph,
    cost: &CostParams,
    mis_size: usize,
    q: f64,
) -> Result<f64> {
    approximation_ratio(&discard_fraction(dist, q, graph, cost)?, graph, cost, mis_size)
}

/// Which probability stands for `p(S*)` when the MIS is degenerate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionRatioMode {
    /// The single most frequent MIS bitstring.
    #[default]
    Single,
    /// The whole solution manifold, against the most frequent non-MIS bitstring.
    Manifold,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolutionRatio {
    pub value: f64,
    /// The most frequent bitstring shared its probability with another one.
    pub tie: bool,
}

/// `S_r = p(S*) / p(S^2nd)` when the most frequent bitstring is a MIS, else 0.
///
/// Ties for most frequent are broken lexicographically and flagged. When no
/// competing bitstring was observed the ratio saturates at the shot count
/// (infinity for distributions without a shot count).
pub fn solution_ratio(dist: &impl Outcomes, mis: &MisSolution, mode: SolutionRatioMode) -> SolutionRatio {
    let mut ranked = dist.probabilities();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let Some(&(top, p_top)) = ranked.first() else {
        return SolutionRatio { value: 0.0, tie: false };
    };
    let tie = ranked.get(1).is_some_and(|&(_, p)| p == p_top);
    if !mis.contains(&top) {
        return SolutionRatio { value: 0.0, tie };
    }
    let saturated = dist.n_shots().map_or(f64::INFINITY, |n| n as f64);
    let (numerator, competitor) = match mode {
        SolutionRatioMode::Single => (p_top, ranked.get(1).map(|&(_, p)| p)),
        SolutionRatioMode::Manifold => (
            ranked.iter().filter(|(b, _)| mis.contains(b)).map(|(_, p)| p).sum(),
            ranked.iter().find(|(b, _)| !mis.contains(b)).map(|&(_, p)| p),
        ),
    };
    let value = match competitor {
        Some(p) if p > 0.0 => numerator / p,
        _ => saturated,
    };
    SolutionRatio { value, tie }
}

/// Leave-one-out jackknife standard error of `estimator` over `shots`.
///
/// Shots with the same bitstring give the same leave-one-out estimate, so
/// the estimator runs once per distinct outcome.
pub fn jackknife_std(
    shots: &[Bitstring],
    n_qubits: usize,
    estimator: impl Fn(&BitstringDistribution) -> Result<f64>,
) -> Result<f64> {
    let n = shots.len();
    if n < 2 {
        return Err(Error::Domain(format!(
            "the jackknife needs at least 2 shots, got {n}"
        )));
    }
    let full = BitstringDistribution::from_shots(n_qubits, shots.iter().copied())?;
    let mut estimates: BTreeMap<Bitstring, (f64, u64)> = BTreeMap::new();
    for (&b, &c) in full.counts() {
        estimates.insert(b, (estimator(&full.without_one(&b))?, c));
    }
    let nf = n as f64;
    let mean = estimates.values().map(|&(t, c)| t * c as f64).sum::<f64>() / nf;
    let ss = estimates
        .values()
        .map(|&(t, c)| c as f64 * (t - mean).powi(2))
        .sum::<f64>();
    Ok(((nf - 1.0) / nf * ss).sqrt())
}

/// Everything needed to score a distribution against a known MIS.
#[derive(Debug, Clone)]
pub struct MetricContext {
    pub graph: Graph,
    pub cost: CostParams,
    pub mis: MisSolution,
    pub keep_fraction: f64,
    pub solution_ratio_mode: SolutionRatioMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub fidelity: f64,
    pub approximation_ratio: f64,
    pub truncated_ratio: f64,
    pub keep_fraction: f64,
    pub solution_ratio: f64,
    pub solution_ratio_tie: bool,
    /// Jackknife standard error of `approximation_ratio`, when shots are available.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub approximation_ratio_std: Option<f64>,
}

impl MetricContext {
    pub fn evaluate<D: Discard>(&self, dist: &D) -> Result<MetricReport> {
        let sr = solution_ratio(dist, &self.mis, self.solution_ratio_mode);
        Ok(MetricReport {
            fidelity: fidelity(dist, &self.mis)?,
            approximation_ratio: approximation_ratio(dist, &self.graph, &self.cost, self.mis.size)?,
            truncated_ratio: truncated_ratio(dist, &self.graph, &self.cost, self.mis.size, self.keep_fraction)?,
            keep_fraction: self.keep_fraction,
            solution_ratio: sr.value,
            solution_ratio_tie: sr.tie,
            approximation_ratio_std: None,
        })
    }

    /// Jackknife error of `R` for a sampled distribution.
    pub fn ratio_std(&self, dist: &BitstringDistribution) -> Result<f64> {
        jackknife_std(&dist.shots(), dist.n_qubits(), |d| {
            approximation_ratio(d, &self.graph, &self.cost, self.mis.size)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distribution::ProbabilityDistribution;
    use crate::graph::brute_force_mis;

    fn b(s: &str) -> Bitstring {
        s.parse().unwrap()
    }

    fn path3() -> (Graph, MisSolution) {
        let g = Graph::new(3, [(0, 1), (1, 2)]).unwrap();
        let mis = brute_force_mis(&g).unwrap();
        (g, mis)
    }

    #[test]
    fn fidelity_examples() {
        let (_, mis) = path3();
        let all = BitstringDistribution::from_counts(3, [(b("101"), 5)]).unwrap();
        assert_eq!(fidelity(&all, &mis).unwrap(), 1.0);
        let none = BitstringDistribution::from_counts(3, [(b("100"), 5)]).unwrap();
        assert_eq!(fidelity(&none, &mis).unwrap(), 0.0);
        let half = BitstringDistribution::from_counts(3, [(b("101"), 5), (b("010"), 5)]).unwrap();
        assert_eq!(fidelity(&half, &mis).unwrap(), 0.5);
    }

    #[test]
    fn degenerate_mis_fidelity() {
        let k3 = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let mis = brute_force_mis(&k3).unwrap();
        let d = BitstringDistribution::from_counts(3, [(b("100"), 1), (b("010"), 1), (b("001"), 1)]).unwrap();
        assert!((fidelity(&d, &mis).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn ratio_examples() {
        let (g, mis) = path3();
        let c = CostParams::default();
        let perfect = BitstringDistribution::from_counts(3, [(b("101"), 3)]).unwrap();
        assert_eq!(approximation_ratio(&perfect, &g, &c, mis.size).unwrap(), 1.0);
        let zeros = BitstringDistribution::from_counts(3, [(b("000"), 3)]).unwrap();
        assert_eq!(approximation_ratio(&zeros, &g, &c, mis.size).unwrap(), 0.0);
        let uniform = BitstringDistribution::from_counts(3, [(b("101"), 1), (b("000"), 1)]).unwrap();
        assert_eq!(approximation_ratio(&uniform, &g, &c, 2).unwrap(), 0.5);
        assert!(approximation_ratio(&uniform, &g, &c, 0).is_err());
    }

    #[test]
    fn truncated_ratio_examples() {
        let (g, _) = path3();
        let c = CostParams::default();
        let d = BitstringDistribution::from_counts(3, [(b("101"), 8), (b("000"), 2)]).unwrap();
        assert_eq!(truncated_ratio(&d, &g, &c, 2, 0.8).unwrap(), 1.0);
        assert_eq!(
            truncated_ratio(&d, &g, &c, 2, 1.0).unwrap(),
            approximation_ratio(&d, &g, &c, 2).unwrap()
        );
        let mut last = f64::NEG_INFINITY;
        for k in (1..=10).rev() {
            let r = truncated_ratio(&d, &g, &c, 2, k as f64 / 10.0).unwrap();
            assert!(r >= last);
            last = r;
        }
    }

    #[test]
    fn solution_ratio_examples() {
        let (_, mis) = path3();
        let d = BitstringDistribution::from_counts(3, [(b("101"), 2), (b("100"), 1), (b("001"), 1)]).unwrap();
        let sr = solution_ratio(&d, &mis, SolutionRatioMode::Single);
        assert_eq!(sr.value, 2.0);
        assert!(!sr.tie);

        let wrong = BitstringDistribution::from_counts(3, [(b("100"), 3), (b("101"), 1)]).unwrap();
        assert_eq!(solution_ratio(&wrong, &mis, SolutionRatioMode::Single).value, 0.0);

        let only = BitstringDistribution::from_counts(3, [(b("101"), 7)]).unwrap();
        assert_eq!(solution_ratio(&only, &mis, SolutionRatioMode::Single).value, 7.0);

        let exact = ProbabilityDistribution::from_weights(3, [(b("101"), 1.0)], None).unwrap();
        assert!(solution_ratio(&exact, &mis, SolutionRatioMode::Single).value.is_infinite());
    }

    #[test]
    fn solution_ratio_ties_and_manifold() {
        let k3 = Graph::new(3, [(0, 1), (1, 2), (0, 2)]).unwrap();
        let mis = brute_force_mis(&k3).unwrap();
        let d = BitstringDistribution::from_counts(
            3,
            [(b("100"), 3), (b("010"), 3), (b("001"), 2), (b("000"), 2)],
        )
        .unwrap();
        let single = solution_ratio(&d, &mis, SolutionRatioMode::Single);
        assert!(single.tie);
        assert_eq!(single.value, 1.0);
        let manifold = solution_ratio(&d, &mis, SolutionRatioMode::Manifold);
        assert_eq!(manifold.value, 8.0 / 2.0);
    }

    #[test]
    fn jackknife_of_mean_is_classical_standard_error() {
        let shots: Vec<Bitstring> = (0..37u128).map(|k| Bitstring::from_index((k * 7919) % 64, 6)).collect();
        let values: Vec<f64> = shots.iter().map(|s| s.count_ones() as f64).collect();
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let s = (values.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let mean_popcount = |d: &BitstringDistribution| -> Result<f64> {
            Ok(d.probabilities().iter().map(|(b, p)| p * b.count_ones() as f64).sum())
        };
        let jk = jackknife_std(&shots, 6, mean_popcount).unwrap();
        assert!((jk - s / n.sqrt()).abs() < 1e-12);

        let same = vec![b("101"); 5];
        assert_eq!(jackknife_std(&same, 3, mean_popcount).unwrap(), 0.0);
        assert!(jackknife_std(&same[..1], 3, mean_popcount).is_err());

        let mut reversed = shots.clone();
        reversed.reverse();
        assert_eq!(jackknife_std(&reversed, 6, mean_popcount).unwrap(), jk);
    }
}
