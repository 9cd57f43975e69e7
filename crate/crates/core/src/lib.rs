//! Closed-loop QAOA for maximum independent set on Rydberg atom arrays.
//!
//! The crate covers the whole loop: encoding a unit-disk graph into an atom
//! register, exact simulation of the pulse sequence, an experimental noise
//! model, readout mitigation, MIS figures of merit, and a Gaussian-process
//! Bayesian optimizer that tunes the pulse durations. [`runner`] ties these
//! together into reproducible experiments with JSONL records and CSV exports.

pub mod bayesopt;
pub mod bitstring;
pub mod distribution;
pub mod dynamics;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod mitigation;
pub mod noise;
pub mod rng;
pub mod runner;

pub use bitstring::Bitstring;
pub use distribution::{BitstringDistribution, Outcomes, ProbabilityDistribution};
pub use error::{Error, Result};
pub use graph::{CostParams, Graph, MisSolution, Register};
pub use rng::{Purpose, SeedSplitter};
