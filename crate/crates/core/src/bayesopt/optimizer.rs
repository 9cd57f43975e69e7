use serde::{Deserialize, Serialize};

use super::acquisition::{suggest_next, AcquisitionOptions};
use super::design::{initial_design, SearchSpace};
use super::gp::{gp_fit, FitOptions, GpPosterior, TrainingSet};
use super::kernel::{euclidean, GpHyperparams, HyperparamBounds};
use crate::error::{Error, Result};
use crate::rng::{Purpose, SeedSplitter};

fn default_init_points() -> usize {
    10
}
fn default_steps() -> usize {
    190
}
fn default_candidates() -> usize {
    2048
}
fn default_restarts() -> usize {
    8
}
fn default_fit_iterations() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoConfig {
    /// Space-filling evaluations before the first model fit, `M`.
    #[serde(default = "default_init_points")]
    pub init_points: usize,
    /// Total objective evaluations including the initial design.
    #[serde(default = "default_steps")]
    pub steps: usize,
    #[serde(default)]
    pub hyperparam_bounds: HyperparamBounds,
    #[serde(default = "default_candidates")]
    pub candidates: usize,
    #[serde(default = "default_restarts")]
    pub restarts: usize,
    #[serde(default = "default_fit_iterations")]
    pub max_fit_iterations: usize,
    /// Overrides the experiment's master seed for the optimizer streams.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Default for BoConfig {
    fn default() -> Self {
        Self {
            init_points: default_init_points(),
            steps: default_steps(),
            hyperparam_bounds: HyperparamBounds::default(),
            candidates: default_candidates(),
            restarts: default_restarts(),
            max_fit_iterations: default_fit_iterations(),
            seed: None,
        }
    }
}

impl BoConfig {
    pub fn validate(&self) -> Result<()> {
        if self.init_points < 2 {
            return Err(Error::Config("init_points must be at least 2".into()));
        }
        if self.steps == 0 {
            return Err(Error::Config("steps must be positive".into()));
        }
        if self.candidates == 0 {
            return Err(Error::Config("candidates must be positive".into()));
        }
        if self.restarts == 0 {
            return Err(Error::Config("restarts must be positive".into()));
        }
        self.hyperparam_bounds.validate()
    }

    fn fit_options(&self) -> FitOptions {
        FitOptions {
            bounds: self.hyperparam_bounds,
            restarts: self.restarts,
            max_iterations: self.max_fit_iterations,
        }
    }

    fn acquisition_options(&self) -> AcquisitionOptions {
        AcquisitionOptions {
            candidates: self.candidates,
            ..AcquisitionOptions::default()
        }
    }
}

/// One evaluated point of the optimization trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoStep {
    pub step: usize,
    /// Parameters in physical units.
    pub theta: Vec<f64>,
    /// The same point in the unit cube.
    pub x: Vec<f64>,
    pub y: f64,
    /// Hyperparameters of the model that proposed this point; `None` for
    /// the initial design.
    pub hyperparams: Option<GpHyperparams>,
    /// Best `y` observed up to and including this step, `f_m`.
    pub incumbent: f64,
    pub incumbent_step: usize,
    /// Unit-cube distance to the previous point, so `D_{i-1,i}`.
    pub distance_from_previous: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct BoState {
    pub steps: Vec<BoStep>,
}

impl BoState {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn incumbent(&self) -> Option<&BoStep> {
        self.steps.last().map(|s| &self.steps[s.incumbent_step])
    }

    pub fn incumbent_trace(&self) -> Vec<f64> {
        self.steps.iter().map(|s| s.incumbent).collect()
    }

    /// `D_{i,i+1}` for each consecutive pair.
    pub fn consecutive_distances(&self) -> Vec<f64> {
        self.steps.iter().filter_map(|s| s.distance_from_previous).collect()
    }
}

#[derive(Debug, Clone)]
struct Pending {
    x: Vec<f64>,
    hyperparams: Option<GpHyperparams>,
}

/// Ask/tell Bayesian optimizer minimizing a noisy objective over a
/// [`SearchSpace`]. Given the same seed and the same reported values, the
/// sequence of suggestions is identical.
#[derive(Debug, Clone)]
pub struct BayesOptimizer {
    space: SearchSpace,
    config: BoConfig,
    seeds: SeedSplitter,
    design: Vec<Vec<f64>>,
    state: BoState,
    pending: Option<Pending>,
    last_hyperparams: Option<GpHyperparams>,
}

impl BayesOptimizer {
    pub fn new(space: SearchSpace, config: BoConfig, seed: u64) -> Result<Self> {
        config.validate()?;
        let seeds = SeedSplitter::new(config.seed.unwrap_or(seed));
        let m = config.init_points.min(config.steps);
        let design = initial_design(&space, m, &mut seeds.stream(Purpose::InitialDesign, 0));
        Ok(Self {
            space,
            config,
            seeds,
            design,
            state: BoState::default(),
            pending: None,
            last_hyperparams: None,
        })
    }

    pub fn space(&self) -> &SearchSpace {
        &self.space
    }

    pub fn config(&self) -> &BoConfig {
        &self.config
    }

    pub fn state(&self) -> &BoState {
        &self.state
    }

    pub fn into_state(self) -> BoState {
        self.state
    }

    pub fn is_finished(&self) -> bool {
        self.state.len() >= self.config.steps
    }

    /// Training data with repeated inputs merged by averaging their outputs.
    fn training_set(&self) -> Result<TrainingSet> {
        let mut inputs: Vec<Vec<f64>> = Vec::new();
        let mut sums: Vec<(f64, usize)> = Vec::new();
        for s in &self.state.steps {
            match inputs.iter().position(|x| euclidean(x, &s.x) <= 1e-12) {
                Some(k) => {
                    sums[k].0 += s.y;
                    sums[k].1 += 1;
                }
                None => {
                    inputs.push(s.x.clone());
                    sums.push((s.y, 1));
                }
            }
        }
        TrainingSet::new(inputs, sums.iter().map(|(s, c)| s / *c as f64).collect())
    }

    /// Fits the surrogate to everything observed so far.
    pub fn fit_model(&self) -> Result<GpPosterior> {
        let data = self.training_set()?;
        let mut rng = self.seeds.stream(Purpose::HyperparamRestarts, self.state.len() as u64);
        let hp = gp_fit(&data, &self.config.fit_options(), self.last_hyperparams.as_ref(), &mut rng)?;
        GpPosterior::new(data, hp)
    }

    /// Next point to evaluate, in physical units. Repeated calls without an
    /// intervening [`tell`](Self::tell) return the same point.
    pub fn ask(&mut self) -> Result<Vec<f64>> {
        if let Some(p) = &self.pending {
            return Ok(self.space.from_unit(&p.x));
        }
        if self.is_finished() {
            return Err(Error::Config(format!(
                "all {} optimization steps have been used",
                self.config.steps
            )));
        }
        let i = self.state.len();
        let pending = if i < self.design.len() {
            Pending {
                x: self.design[i].clone(),
                hyperparams: None,
            }
        } else {
            let model = self.fit_model()?;
            let f_m = model
                .data()
                .standardized_outputs()
                .iter()
                .copied()
                .fold(f64::INFINITY, f64::min);
            let mut rng = self.seeds.stream(Purpose::Acquisition, i as u64);
            let x = suggest_next(&model, &self.space, f_m, &self.config.acquisition_options(), &mut rng)?;
            self.last_hyperparams = Some(*model.hyperparams());
            Pending {
                x,
                hyperparams: Some(*model.hyperparams()),
            }
        };
        let theta = self.space.from_unit(&pending.x);
        self.pending = Some(pending);
        Ok(theta)
    }

    /// Records the objective value for the outstanding suggestion.
    pub fn tell(&mut self, y: f64) -> Result<&BoStep> {
        let step = self.state.len();
        if !y.is_finite() {
            return Err(Error::Objective {
                step,
                message: format!("objective value {y} is not finite"),
            });
        }
        let pending = self
            .pending
            .take()
            .ok_or_else(|| Error::Config("tell called without a pending suggestion".into()))?;
        let (incumbent, incumbent_step) = match self.state.steps.last() {
            Some(prev) if prev.incumbent <= y => (prev.incumbent, prev.incumbent_step),
            _ => (y, step),
        };
        let distance_from_previous = self.state.steps.last().map(|prev| euclidean(&prev.x, &pending.x));
        self.state.steps.push(BoStep {
            step,
            theta: self.space.from_unit(&pending.x),
            x: pending.x,
            y,
            hyperparams: pending.hyperparams,
            incumbent,
            incumbent_step,
            distance_from_previous,
        });
        Ok(self.state.steps.last().expect("just pushed"))
    }
}

/// Runs the full loop, calling `observer` after every step so callers can
/// persist progress. Errors from the objective or observer stop the loop;
/// steps already passed to the observer are unaffected.
pub fn bo_loop_observed(
    space: SearchSpace,
    config: BoConfig,
    seed: u64,
    mut objective: impl FnMut(usize, &[f64]) -> Result<f64>,
    mut observer: impl FnMut(&BoStep) -> Result<()>,
) -> Result<BoState> {
    let mut opt = BayesOptimizer::new(space, config, seed)?;
    while !opt.is_finished() {
        let theta = opt.ask()?;
        let step = opt.state().len();
        let y = objective(step, &theta).map_err(|e| match e {
            e @ Error::Objective { .. } => e,
            other => Error::Objective {
                step,
                message: other.to_string(),
            },
        })?;
        observer(opt.tell(y)?)?;
    }
    Ok(opt.into_state())
}

/// Minimizes `objective` over `space` for `config.steps` evaluations.
pub fn bo_loop(
    space: SearchSpace,
    config: BoConfig,
    seed: u64,
    mut objective: impl FnMut(&[f64]) -> Result<f64>,
) -> Result<BoState> {
    bo_loop_observed(space, config, seed, |_, t| objective(t), |_| Ok(()))
}
