use rand::Rng;
use rayon::prelude::*;
use statrs::function::erf::erfc;

use super::design::SearchSpace;
use super::gp::GpPosterior;
use crate::error::{Error, Result};

const MIN_STD: f64 = 1e-12;

fn normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

/// Minimization-form expected improvement for a Gaussian with mean `mean`
/// and variance `variance` below the incumbent `f_m`.
pub fn expected_improvement_from_moments(mean: f64, variance: f64, f_m: f64) -> f64 {
    let s = variance.max(0.0).sqrt();
    let gain = f_m - mean;
    if s < MIN_STD {
        return gain.max(0.0);
    }
    let z = gain / s;
    (gain * normal_cdf(z) + s * normal_pdf(z)).max(0.0)
}

/// Expected improvement at the unit-cube point `x`; `f_m` is the incumbent in
/// the model's standardized units.
pub fn expected_improvement(model: &GpPosterior, x: &[f64], f_m: f64) -> Result<f64> {
    let (mean, var) = model.predict(x)?;
    Ok(expected_improvement_from_moments(mean, var, f_m))
}

/// Candidate sampling and local refinement settings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AcquisitionOptions {
    pub candidates: usize,
    pub initial_step: f64,
    pub min_step: f64,
    pub max_sweeps: usize,
}

impl Default for AcquisitionOptions {
    fn default() -> Self {
        Self {
            candidates: 2048,
            initial_step: 0.05,
            min_step: 1e-4,
            max_sweeps: 200,
        }
    }
}

fn sample_candidates(space: &SearchSpace, count: usize, rng: &mut impl Rng) -> Vec<Vec<f64>> {
    let dim = space.dim();
    let max_draws = count.saturating_mul(1000);
    let mut out = Vec::with_capacity(count);
    let mut draws = 0;
    while out.len() < count {
        let x: Vec<f64> = (0..dim).map(|_| rng.random()).collect();
        draws += 1;
        if space.is_feasible_unit(&x) {
            out.push(x);
        } else if draws > max_draws {
            out.push(space.shrink_unit(&x));
        }
    }
    out
}

/// Maximizes expected improvement over the feasible polytope: EI is
/// evaluated on uniform feasible candidates, then the best one is polished by
/// coordinate search where each move is clipped to the box and budget.
/// Returns a unit-cube point.
pub fn suggest_next(
    model: &GpPosterior,
    space: &SearchSpace,
    f_m: f64,
    options: &AcquisitionOptions,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    if space.dim() != model.data().dim() {
        return Err(Error::LengthMismatch {
            expected: model.data().dim(),
            found: space.dim(),
        });
    }
    if options.candidates == 0 {
        return Err(Error::Config("at least one acquisition candidate is required".into()));
    }
    let candidates = sample_candidates(space, options.candidates, rng);
    let scores: Vec<f64> = candidates
        .par_iter()
        .map(|x| expected_improvement(model, x, f_m))
        .collect::<Result<_>>()?;
    let (best_index, mut best_score) = scores
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |acc, (i, s)| if s > acc.1 { (i, s) } else { acc });
    let mut x = candidates[best_index].clone();

    let mut step = options.initial_step;
    let mut sweeps = 0;
    while step >= options.min_step && sweeps < options.max_sweeps {
        sweeps += 1;
        let mut improved = false;
        for k in 0..x.len() {
            for dir in [1.0, -1.0] {
                let hi = space.coordinate_max(&x, k);
                let trial_value = (x[k] + dir * step).clamp(0.0, hi);
                if trial_value == x[k] {
                    continue;
                }
                let mut trial = x.clone();
                trial[k] = trial_value;
                let score = expected_improvement(model, &trial, f_m)?;
                if score > best_score {
                    best_score = score;
                    x = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bayesopt::gp::TrainingSet;
    use crate::bayesopt::kernel::GpHyperparams;
    use crate::rng::{Purpose, SeedSplitter};

    #[test]
    fn closed_form_examples() {
        assert_eq!(expected_improvement_from_moments(1.0, 0.0, 0.5), 0.0);
        assert_eq!(expected_improvement_from_moments(0.5, 0.0, 0.5), 0.0);
        assert_eq!(expected_improvement_from_moments(0.2, 0.0, 0.5), 0.3);
        let ei = expected_improvement_from_moments(0.3, 1.0, 0.3);
        assert!((ei - 0.398_942_280_401_432_7).abs() < 1e-12);
        // Large positive z approaches the deterministic gain.
        assert!((expected_improvement_from_moments(-10.0, 1e-4, 0.0) - 10.0).abs() < 1e-9);
    }

    fn model(points: &[(f64, f64, f64)], noise: f64) -> GpPosterior {
        let data = TrainingSet::new(
            points.iter().map(|p| vec![p.0, p.1]).collect(),
            points.iter().map(|p| p.2).collect(),
        )
        .unwrap();
        GpPosterior::new(data, GpHyperparams::new(1.0, 0.3, noise).unwrap()).unwrap()
    }

    #[test]
    fn ei_is_non_negative_and_zero_at_incumbent() {
        let gp = model(&[(0.1, 0.2, 1.0), (0.8, 0.5, -0.5), (0.4, 0.9, 0.3)], 0.0);
        let f_m = gp.data().standardized_outputs().iter().copied().fold(f64::INFINITY, f64::min);
        assert!(expected_improvement(&gp, &[0.8, 0.5], f_m).unwrap().abs() < 1e-7);
        let mut rng = SeedSplitter::new(2).stream(Purpose::User, 0);
        for _ in 0..10_000 {
            let x = [rng.random::<f64>() * 3.0 - 1.0, rng.random::<f64>() * 3.0 - 1.0];
            assert!(expected_improvement(&gp, &x, f_m).unwrap() >= 0.0);
        }
    }

    #[test]
    fn suggestion_is_feasible_and_explores() {
        let space = SearchSpace::pulse_durations(1, 0.1, 1.0, 1.2).unwrap();
        let gp = model(&[(0.3, 0.3, 0.0)], 0.0);
        let f_m = gp.data().standardized_outputs()[0];
        let mut rng = SeedSplitter::new(3).stream(Purpose::Acquisition, 0);
        let x = suggest_next(&gp, &space, f_m, &AcquisitionOptions::default(), &mut rng).unwrap();
        assert!(space.is_feasible_unit(&x));
        assert!(((x[0] - 0.3).powi(2) + (x[1] - 0.3).powi(2)).sqrt() > 1e-3);
    }

    #[test]
    fn inactive_budget_searches_whole_box() {
        let space = SearchSpace::pulse_durations(1, 0.1, 1.0, 2.0).unwrap();
        // Low values near the corner (1, 1) pull the suggestion there.
        let gp = model(&[(0.0, 0.0, 1.0), (1.0, 0.0, 0.5), (0.0, 1.0, 0.5), (0.9, 0.9, -1.0)], 1e-6);
        let f_m = gp.data().standardized_outputs().iter().copied().fold(f64::INFINITY, f64::min);
        let mut rng = SeedSplitter::new(4).stream(Purpose::Acquisition, 0);
        let x = suggest_next(&gp, &space, f_m, &AcquisitionOptions::default(), &mut rng).unwrap();
        assert!(x[0] > 0.6 && x[1] > 0.6, "{x:?}");
    }
}
