//! Gaussian-process Bayesian optimization of pulse durations.
//!
//! The surrogate is a zero-mean GP with a Matérn-3/2 kernel on inputs
//! rescaled to the unit cube and outputs standardized per refit.
//! Hyperparameters maximize the log marginal likelihood; new points maximize
//! expected improvement over the box intersected with a total-duration budget.

pub mod acquisition;
pub mod design;
pub mod gp;
pub mod kernel;
pub mod optimizer;

pub use acquisition::{expected_improvement, suggest_next, AcquisitionOptions};
pub use design::{initial_design, ScrambledHalton, SearchSpace};
pub use gp::{gp_fit, log_marginal_likelihood, FitOptions, GpPosterior, TrainingSet};
pub use kernel::{matern32, GpHyperparams, HyperparamBounds};
pub use optimizer::{bo_loop, bo_loop_observed, BayesOptimizer, BoConfig, BoState, BoStep};
