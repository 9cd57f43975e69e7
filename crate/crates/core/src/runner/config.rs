//! JSON experiment configuration. Physical quantities carry unit-suffixed
//! keys: `*_MHz` (cyclic frequency, multiplied by 2π internally), `*_us`,
//! `*_um`, `*_uK`.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::benchmarks::{benchmark_register, BENCHMARK_SPACING_UM};
use crate::bayesopt::{BoConfig, SearchSpace};
use crate::dynamics::{DriveParams, SequenceLimits, C6_RB87_60S, MAX_SIMULATED_QUBITS, TWO_PI};
use crate::error::{Error, Result};
use crate::graph::{
    blockade_radius, brute_force_mis, edges_from_register, CostParams, Graph, GraphSpec, MisSolution, Register,
    RegisterSpec,
};
use crate::metrics::{MetricContext, SolutionRatioMode};
use crate::mitigation::{MitigationConfig, DEFAULT_KEEP_FRACTION};
use crate::noise::NoiseConfig;

fn default_spacing() -> f64 {
    BENCHMARK_SPACING_UM
}

/// Where the problem graph comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ProblemSource {
    /// A built-in triangular-lattice register.
    Benchmark {
        n: usize,
        #[serde(default = "default_spacing")]
        spacing_um: f64,
    },
    /// An explicit register; the graph follows from the blockade radius.
    Register(RegisterSpec),
    /// An abstract graph. Enough for the MIS oracle and metrics, but the
    /// dynamics needs atom positions.
    Graph(GraphSpec),
}

fn default_omega() -> f64 {
    1.0
}
fn default_delta() -> f64 {
    1.5
}
fn default_c6() -> f64 {
    C6_RB87_60S / TWO_PI
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    #[serde(rename = "omega_MHz", default = "default_omega")]
    pub omega_mhz: f64,
    #[serde(rename = "delta_MHz", default = "default_delta")]
    pub delta_mhz: f64,
    #[serde(rename = "c6_MHz_um6", default = "default_c6")]
    pub c6_mhz_um6: f64,
}

impl Default for DriveConfig {
    fn default() -> Self {
        Self {
            omega_mhz: default_omega(),
            delta_mhz: default_delta(),
            c6_mhz_um6: default_c6(),
        }
    }
}

impl DriveConfig {
    pub fn params(&self) -> Result<DriveParams> {
        DriveParams::new(TWO_PI * self.omega_mhz, TWO_PI * self.delta_mhz, TWO_PI * self.c6_mhz_um6)
    }
}

fn default_penalty() -> f64 {
    2.0
}
fn default_keep_fraction() -> f64 {
    DEFAULT_KEEP_FRACTION
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsConfig {
    /// Penalty `c` per violated edge in the classical cost.
    #[serde(default = "default_penalty")]
    pub penalty: f64,
    /// `q` of the reported truncated ratio `R_q`.
    #[serde(default = "default_keep_fraction")]
    pub keep_fraction: f64,
    #[serde(default)]
    pub solution_ratio_mode: SolutionRatioMode,
    /// Attach a jackknife error to `R` at every step.
    #[serde(default = "default_true")]
    pub jackknife: bool,
}

impl Default for MetricsConfig {
    fn default() -> Self {
        Self {
            penalty: default_penalty(),
            keep_fraction: default_keep_fraction(),
            solution_ratio_mode: SolutionRatioMode::default(),
            jackknife: true,
        }
    }
}

fn default_depth() -> usize {
    2
}
fn default_shots() -> u64 {
    64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Series label used by sweeps and exports; defaults to the record file stem.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub problem: ProblemSource,
    #[serde(default)]
    pub drive: DriveConfig,
    /// QAOA depth `p`.
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_shots")]
    pub shots: u64,
    /// Omitted means noiseless; a present block starts from the default noise values.
    #[serde(default = "NoiseConfig::noiseless")]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub mitigation: MitigationConfig,
    #[serde(default)]
    pub bo: BoConfig,
    #[serde(default)]
    pub metrics: MetricsConfig,
    #[serde(default)]
    pub limits: SequenceLimits,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    /// Defaults around a problem source: noiseless, depth 2, 64 shots.
    pub fn new(problem: ProblemSource) -> Self {
        Self {
            name: None,
            problem,
            drive: DriveConfig::default(),
            depth: default_depth(),
            shots: default_shots(),
            noise: NoiseConfig::noiseless(),
            mitigation: MitigationConfig::default(),
            bo: BoConfig::default(),
            metrics: MetricsConfig::default(),
            limits: SequenceLimits::default(),
            output_dir: None,
            seed: 0,
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    /// Checks every setting and builds the problem, before any simulation.
    pub fn validate(&self) -> Result<Problem> {
        let problem = Problem::build(self)?;
        if problem.register.is_none() {
            return Err(Error::Config(
                "running an experiment needs atom positions; use a `benchmark` or `register` problem".into(),
            ));
        }
        if problem.graph.n() > MAX_SIMULATED_QUBITS {
            return Err(Error::TooLarge {
                what: "simulated register",
                size: problem.graph.n(),
                max: MAX_SIMULATED_QUBITS,
            });
        }
        if self.depth == 0 || self.depth > self.limits.max_depth {
            return Err(Error::Config(format!(
                "depth must be in 1..={}, got {}",
                self.limits.max_depth, self.depth
            )));
        }
        if self.shots < 2 {
            return Err(Error::Config("at least 2 shots per step are required".into()));
        }
        self.noise.validate()?;
        self.noise.detection_model(problem.graph.n())?;
        self.mitigation.validate()?;
        self.bo.validate()?;
        if !(self.metrics.keep_fraction > 0.0 && self.metrics.keep_fraction <= 1.0) {
            return Err(Error::Config(format!(
                "metrics keep_fraction must lie in (0, 1], got {}",
                self.metrics.keep_fraction
            )));
        }
        self.search_space(&problem.drive)?;
        Ok(problem)
    }

    /// Box of pulse durations and the budget left after the initial pulse.
    pub fn search_space(&self, drive: &DriveParams) -> Result<SearchSpace> {
        SearchSpace::pulse_durations(
            self.depth,
            self.limits.min_pulse_us,
            self.limits.max_pulse_us,
            self.limits.max_total_us - drive.initial_pulse_us(),
        )
    }
}

/// A resolved problem instance with its MIS oracle.
#[derive(Debug, Clone)]
pub struct Problem {
    pub register: Option<Register>,
    pub graph: Graph,
    pub mis: MisSolution,
    pub drive: DriveParams,
    pub cost: CostParams,
}

impl Problem {
    pub fn build(config: &ExperimentConfig) -> Result<Self> {
        let drive = config.drive.params()?;
        let register = match &config.problem {
            ProblemSource::Benchmark { n, spacing_um } => Some(benchmark_register(*n, *spacing_um)?),
            ProblemSource::Register(spec) => Some(spec.build()?),
            ProblemSource::Graph(_) => None,
        };
        let graph = match (&config.problem, &register) {
            (ProblemSource::Graph(spec), _) => spec.build()?,
            (_, Some(reg)) => edges_from_register(reg, blockade_radius(drive.c6_over_hbar, drive.omega)?)?,
            (_, None) => unreachable!("registers exist for every non-graph source"),
        };
        let mis = brute_force_mis(&graph)?;
        if mis.size == 0 {
            return Err(Error::Config("the graph has no vertices".into()));
        }
        Ok(Self {
            register,
            graph,
            mis,
            drive,
            cost: CostParams::new(config.metrics.penalty)?,
        })
    }

    pub fn metric_context(&self, metrics: &MetricsConfig) -> MetricContext {
        MetricContext {
            graph: self.graph.clone(),
            cost: self.cost,
            mis: self.mis.clone(),
            keep_fraction: metrics.keep_fraction,
            solution_ratio_mode: metrics.solution_ratio_mode,
        }
    }
}
