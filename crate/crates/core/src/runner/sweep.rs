//! Repeated experiments along one axis, and their aggregation into mean ± ½ std traces.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{ExperimentConfig, ProblemSource};
use super::experiment::{record_path, run_experiment};
use super::record::RunRecord;
use crate::error::{Error, Result};
use crate::rng::SeedSplitter;

/// Seeds per value in a sweep unless overridden.
pub const DEFAULT_SWEEP_SEEDS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Number of atoms of the built-in register.
    Size,
    /// Shots per step.
    Shots,
}

impl SweepAxis {
    pub fn label(&self) -> &'static str {
        match self {
            SweepAxis::Size => "size",
            SweepAxis::Shots => "shots",
        }
    }

    /// The template with this axis set to `value`.
    pub fn apply(&self, template: &ExperimentConfig, value: u64) -> Result<ExperimentConfig> {
        let mut cfg = template.clone();
        match self {
            SweepAxis::Size => match &mut cfg.problem {
                ProblemSource::Benchmark { n, .. } => *n = value as usize,
                _ => {
                    return Err(Error::Config(
                        "a size sweep needs a `benchmark` problem in the template".into(),
                    ))
                }
            },
            SweepAxis::Shots => cfg.shots = value,
        }
        Ok(cfg)
    }
}

impl std::str::FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "size" => Ok(SweepAxis::Size),
            "shots" => Ok(SweepAxis::Shots),
            other => Err(Error::Config(format!("unknown sweep axis {other:?}; use size or shots"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepGroup {
    pub value: u64,
    pub records: Vec<RunRecord>,
}

/// Runs `seeds_per_value` experiments for every value, in parallel. Run `k`
/// of value `i` uses a child seed derived from the template seed and `(i, k)`.
/// Records are also written to `out_dir` when given.
pub fn sweep(
    template: &ExperimentConfig,
    axis: SweepAxis,
    values: &[u64],
    seeds_per_value: usize,
    out_dir: Option<&Path>,
) -> Result<Vec<SweepGroup>> {
    if values.is_empty() || seeds_per_value == 0 {
        return Err(Error::Config("a sweep needs at least one value and one seed".into()));
    }
    let splitter = SeedSplitter::new(template.seed);
    let mut jobs = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let base = axis.apply(template, v)?;
        base.validate()?;
        for k in 0..seeds_per_value {
            let mut cfg = base.clone();
            cfg.name = Some(format!("{}={v}", axis.label()));
            cfg.seed = splitter.child_seed(((i as u64) << 20) | k as u64);
            jobs.push((i, cfg));
        }
    }
    let results: Vec<(usize, RunRecord)> = jobs
        .par_iter()
        .map(|(i, cfg)| {
            let path = out_dir.map(|d| record_path(cfg, d));
            run_experiment(cfg, path.as_deref()).map(|r| (*i, r))
        })
        .collect::<Result<_>>()?;
    let mut groups: Vec<SweepGroup> = values
        .iter()
        .map(|&value| SweepGroup {
            value,
            records: Vec::new(),
        })
        .collect();
    for (i, r) in results {
        groups[i].records.push(r);
    }
    Ok(groups)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanHalfStd {
    pub mean: f64,
    /// Half the sample standard deviation; zero for a single run.
    pub half_std: f64,
}

impl MeanHalfStd {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            mean,
            half_std: 0.5 * std,
        }
    }
}

/// Figures of merit of the incumbent at one step, averaged over runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergencePoint {
    pub step: usize,
    pub n_runs: usize,
    pub one_minus_r: MeanHalfStd,
    pub fidelity: MeanHalfStd,
    pub solution_ratio: MeanHalfStd,
}

/// Mean ± ½ std of the incumbent's `1 − R`, `F` and `S_r` at each step,
/// over the runs that reached that step.
pub fn aggregate_convergence(records: &[&RunRecord]) -> Vec<ConvergencePoint> {
    let traces: Vec<Vec<_>> = records.iter().map(|r| r.incumbent_trace().collect()).collect();
    let longest = traces.iter().map(Vec::len).max().unwrap_or(0);
    (0..longest)
        .map(|step| {
            let at: Vec<_> = traces.iter().filter_map(|t| t.get(step)).collect();
            let pick = |f: &dyn Fn(&crate::metrics::MetricReport) -> f64| {
                MeanHalfStd::of(&at.iter().map(|s| f(&s.metrics)).collect::<Vec<_>>())
            };
            ConvergencePoint {
                step,
                n_runs: at.len(),
                one_minus_r: pick(&|m| 1.0 - m.approximation_ratio),
                fidelity: pick(&|m| m.fidelity),
                solution_ratio: pick(&|m| m.solution_ratio),
            }
        })
        .collect()
}
