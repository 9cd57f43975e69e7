use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
const FEASIBILITY_SLACK: f64 = 1e-12;

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * f;
        i /= base;
        f *= inv;
    }
    out
}

/// Halton sequence with a random Cranley–Patterson rotation.
#[derive(Debug, Clone, PartialEq)]
pub struct ScrambledHalton {
    shift: Vec<f64>,
}

impl ScrambledHalton {
    /// # Panics
    /// If `dim` exceeds the number of tabulated prime bases (16).
    pub fn new(dim: usize, rng: &mut impl Rng) -> Self {
        assert!(dim <= PRIMES.len(), "Halton design supports at most {} dimensions", PRIMES.len());
        Self {
            shift: (0..dim).map(|_| rng.random()).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.shift.len()
    }

    pub fn point(&self, index: u64) -> Vec<f64> {
        self.shift
            .iter()
            .zip(PRIMES)
            .map(|(s, b)| (radical_inverse(index + 1, b) + s).fract())
            .collect()
    }
}

/// Box `[lower, upper]` in physical units intersected with `Σθ ≤ budget`.
///
/// Points handed to the GP are affinely rescaled to the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    lower: Vec<f64>,
    upper: Vec<f64>,
    budget: f64,
}

impl SearchSpace {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>, budget: f64) -> Result<Self> {
        if lower.len() != upper.len() {
            return Err(Error::LengthMismatch {
                expected: lower.len(),
                found: upper.len(),
            });
        }
        if lower.is_empty() || lower.len() > PRIMES.len() {
            return Err(Error::Config(format!(
                "search space dimension must be in 1..={}, got {}",
                PRIMES.len(),
                lower.len()
            )));
        }
        if lower.iter().zip(&upper).any(|(l, u)| !(l < u) || !l.is_finite() || !u.is_finite()) {
            return Err(Error::Config("every lower bound must be below its upper bound".into()));
        }
        if !(lower.iter().sum::<f64>() <= budget + FEASIBILITY_SLACK) {
            return Err(Error::Config(format!(
                "budget {budget} is below the sum of lower bounds {}",
                lower.iter().sum::<f64>()
            )));
        }
        Ok(Self { lower, upper, budget })
    }

    /// `2p` pulse durations in `[min, max]` μs whose sum fits in `budget` μs.
    pub fn pulse_durations(depth: usize, min_us: f64, max_us: f64, budget_us: f64) -> Result<Self> {
        Self::new(vec![min_us; 2 * depth], vec![max_us; 2 * depth], budget_us)
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn budget(&self) -> f64 {
        self.budget
    }

    pub fn to_unit(&self, theta: &[f64]) -> Vec<f64> {
        theta
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(t, (l, u))| (t - l) / (u - l))
            .collect()
    }

    pub fn from_unit(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .map(|(v, (l, u))| l + v * (u - l))
            .collect()
    }

    fn width(&self, k: usize) -> f64 {
        self.upper[k] - self.lower[k]
    }

    /// Budget left over by a unit-cube point, in physical units.
    pub fn slack_unit(&self, x: &[f64]) -> f64 {
        self.budget - self.from_unit(x).iter().sum::<f64>()
    }

    pub fn is_feasible_unit(&self, x: &[f64]) -> bool {
        x.iter().all(|v| (0.0..=1.0).contains(v)) && self.slack_unit(x) >= -FEASIBILITY_SLACK
    }

    pub fn is_feasible(&self, theta: &[f64]) -> bool {
        theta.len() == self.dim() && self.is_feasible_unit(&self.to_unit(theta))
    }

    /// Largest unit coordinate `k` may take with the others held fixed.
    pub(crate) fn coordinate_max(&self, x: &[f64], k: usize) -> f64 {
        let slack = self.slack_unit(x) + x[k] * self.width(k);
        (slack / self.width(k)).clamp(0.0, 1.0)
    }

    /// Pulls an infeasible unit point toward the lower corner until it fits the budget.
    pub(crate) fn shrink_unit(&self, x: &[f64]) -> Vec<f64> {
        let mut out: Vec<f64> = x.iter().map(|v| v.clamp(0.0, 1.0)).collect();
        let spent: f64 = out.iter().enumerate().map(|(k, v)| v * self.width(k)).sum();
        let available = self.budget - self.lower.iter().sum::<f64>();
        if spent > available {
            let s = available / spent;
            for v in &mut out {
                *v *= s;
            }
        }
        out
    }
}

/// `m` feasible unit-cube points from a scrambled Halton sequence, skipping
/// points that violate the budget.
pub fn initial_design(space: &SearchSpace, m: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let halton = ScrambledHalton::new(space.dim(), rng);
    let max_draws = (m as u64).saturating_mul(10_000).max(10_000);
    let mut out = Vec::with_capacity(m);
    let mut index = 0;
    while out.len() < m && index < max_draws {
        let x = halton.point(index);
        if space.is_feasible_unit(&x) {
            out.push(x);
        }
        index += 1;
    }
    while out.len() < m {
        out.push(space.shrink_unit(&halton.point(index)));
        index += 1;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, SeedSplitter};

    #[test]
    fn radical_inverse_examples() {
        assert_eq!(radical_inverse(1, 2), 0.5);
        assert_eq!(radical_inverse(3, 2), 0.75);
        assert!((radical_inverse(5, 3) - 7.0 / 9.0).abs() < 1e-15);
    }

    #[test]
    fn unit_round_trip_and_feasibility() {
        let space = SearchSpace::pulse_durations(2, 0.1, 1.0, 3.0).unwrap();
        let theta = [0.1, 1.0, 0.55, 0.3];
        let back = space.from_unit(&space.to_unit(&theta));
        assert!(back.iter().zip(theta).all(|(a, b)| (a - b).abs() < 1e-15));
        assert!(space.is_feasible(&theta));
        assert!(!space.is_feasible(&[1.0, 1.0, 1.0, 0.5]));
        assert!(SearchSpace::pulse_durations(5, 0.1, 1.0, 0.9).is_err());
    }

    #[test]
    fn shrink_and_coordinate_max_respect_budget() {
        let space = SearchSpace::pulse_durations(3, 0.1, 1.0, 2.0).unwrap();
        let x = space.shrink_unit(&[1.0; 6]);
        assert!(space.is_feasible_unit(&x));
        assert!(space.slack_unit(&x).abs() < 1e-12);
        let y = vec![0.0; 6];
        let m = space.coordinate_max(&y, 2);
        assert_eq!(m, 1.0);
        let z = vec![0.5; 6];
        let m = space.coordinate_max(&z, 0);
        let mut w = z.clone();
        w[0] = m;
        assert!(space.slack_unit(&w).abs() < 1e-12 || m == 1.0 || m == 0.0);
    }

    #[test]
    fn design_is_feasible_and_spread() {
        let space = SearchSpace::pulse_durations(5, 0.1, 1.0, 3.75).unwrap();
        let mut rng = SeedSplitter::new(1).stream(Purpose::InitialDesign, 0);
        let pts = initial_design(&space, 20, &mut rng);
        assert_eq!(pts.len(), 20);
        assert!(pts.iter().all(|x| space.is_feasible_unit(x)));
        let mut dedup = pts.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), 20);
    }
}
