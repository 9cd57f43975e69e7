//! Probing `1 − R` along a fixed pulse schedule, noiseless versus sampled.

use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use super::record::read_record;
use super::simulate::ShotSimulator;
use crate::distribution::{BitstringDistribution, Outcomes, ProbabilityDistribution};
use crate::dynamics::PulseSequence;
use crate::error::{Error, Result};
use crate::metrics::{approximation_ratio, jackknife_std, truncated_ratio, MetricContext};
use crate::mitigation::spam_correct;
use crate::rng::SeedSplitter;

/// Shot streams of benchmarks start here so they never share a stream with
/// the optimization steps of the same seed.
const BENCH_BATCH_OFFSET: u64 = 1 << 40;

/// On-disk pulse schedule: `{"params_us": [t_δ¹, t_Ω¹, …]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SequenceSpec {
    pub params_us: Vec<f64>,
}

/// Loads a schedule from a [`SequenceSpec`] file, or takes the best
/// parameters of a run record (`.jsonl`).
pub fn load_sequence_params(path: &Path) -> Result<Vec<f64>> {
    if path.extension().is_some_and(|e| e == "jsonl") {
        let record = read_record(path)?;
        return record
            .final_step()
            .map(|s| s.theta_us.clone())
            .ok_or_else(|| Error::Config(format!("{} has no steps", path.display())));
    }
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let spec: SequenceSpec =
        serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    Ok(spec.params_us)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchSeries {
    /// Exact probabilities of the noiseless dynamics.
    Noiseless,
    /// Sampled shots under the configured noise.
    NoisyRaw,
    /// The same shots after readout correction.
    NoisyCorrected,
}

impl BenchSeries {
    pub fn label(&self) -> &'static str {
        match self {
            BenchSeries::Noiseless => "noiseless",
            BenchSeries::NoisyRaw => "noisy_raw",
            BenchSeries::NoisyCorrected => "noisy_corrected",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub series: BenchSeries,
    pub time_us: f64,
    pub keep_fraction: f64,
    pub one_minus_r: f64,
    /// Jackknife error; absent for exact probabilities.
    pub one_minus_r_std: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchTable {
    pub name: Option<String>,
    pub n_qubits: usize,
    pub shots: u64,
    pub params_us: Vec<f64>,
    pub total_duration_us: f64,
    pub keep_fractions: Vec<f64>,
    pub rows: Vec<BenchRow>,
}

impl BenchTable {
    pub fn series(&self, series: BenchSeries, keep_fraction: f64) -> Vec<&BenchRow> {
        self.rows
            .iter()
            .filter(|r| r.series == series && r.keep_fraction == keep_fraction)
            .collect()
    }

    /// Mean `|R_q(series) − R_q(noiseless)|` over the probe times.
    pub fn mean_gap_to_noiseless(&self, series: BenchSeries, keep_fraction: f64) -> Option<f64> {
        let exact = self.series(BenchSeries::Noiseless, keep_fraction);
        let other = self.series(series, keep_fraction);
        if other.is_empty() || other.len() != exact.len() {
            return None;
        }
        Some(
            exact
                .iter()
                .zip(&other)
                .map(|(a, b)| (a.one_minus_r - b.one_minus_r).abs())
                .sum::<f64>()
                / exact.len() as f64,
        )
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let text = serde_json::to_string_pretty(self)?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(serde_json::from_str(&text)?)
    }
}

/// `n` probe times spread evenly from the end of the initial pulse to the
/// end of the schedule.
pub fn even_probe_times(seq: &PulseSequence, n: usize) -> Vec<f64> {
    let start = seq.initial_mixing_us();
    let end = seq.total_duration_us();
    match n {
        0 => Vec::new(),
        1 => vec![end],
        _ => (0..n)
            .map(|k| start + (end - start) * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn exact_row(ctx: &MetricContext, probs: &ProbabilityDistribution, q: f64) -> Result<f64> {
    Ok(1.0 - truncated_ratio(probs, &ctx.graph, &ctx.cost, ctx.mis.size, q)?)
}

/// Evaluates `1 − R_q` for every `q` in `{1} ∪ {metrics.keep_fraction}`
/// after truncating `params_us` at each probe time, with jackknife errors on
/// the sampled series. The corrected series appears when the noise config
/// includes readout errors.
pub fn bench_dynamics(config: &ExperimentConfig, params_us: &[f64], probe_times: &[f64]) -> Result<BenchTable> {
    let problem = config.validate()?;
    let register = problem.register.as_ref().expect("validated configs have a register");
    let seq = PulseSequence::from_params(params_us, &problem.drive, &config.limits)?;
    let total = seq.total_duration_us();
    if let Some(t) = probe_times.iter().find(|&&t| !(0.0..=total + 1e-12).contains(&t)) {
        return Err(Error::Domain(format!("probe time {t} μs lies outside [0, {total}] μs")));
    }
    let noisy = ShotSimulator::new(register, &problem.drive, &config.noise)?;
    let ctx = problem.metric_context(&config.metrics);
    let detection = noisy.detection_model().cloned();
    let radius = config.mitigation.expansion_radius;
    let seeds = SeedSplitter::new(config.seed);
    let mut keep_fractions = vec![1.0];
    if config.metrics.keep_fraction < 1.0 {
        keep_fractions.push(config.metrics.keep_fraction);
    }

    let mut rows = Vec::new();
    for (k, &t) in probe_times.iter().enumerate() {
        let segments = seq.truncated(t.min(total))?;
        let exact = noisy.exact_probabilities(&segments)?;
        let raw = noisy.sample(&segments, config.shots, &seeds, BENCH_BATCH_OFFSET + k as u64)?;
        let shots = raw.shots();
        let n = raw.n_qubits();
        for &q in &keep_fractions {
            rows.push(BenchRow {
                series: BenchSeries::Noiseless,
                time_us: t,
                keep_fraction: q,
                one_minus_r: exact_row(&ctx, &exact, q)?,
                one_minus_r_std: None,
            });
            let raw_ratio = |d: &BitstringDistribution| truncated_ratio(d, &ctx.graph, &ctx.cost, ctx.mis.size, q);
            rows.push(BenchRow {
                series: BenchSeries::NoisyRaw,
                time_us: t,
                keep_fraction: q,
                one_minus_r: 1.0 - raw_ratio(&raw)?,
                one_minus_r_std: Some(jackknife_std(&shots, n, raw_ratio)?),
            });
            if let Some(model) = &detection {
                let corrected_ratio = |d: &BitstringDistribution| {
                    let c = spam_correct(d, model, radius)?;
                    truncated_ratio(&c, &ctx.graph, &ctx.cost, ctx.mis.size, q)
                };
                rows.push(BenchRow {
                    series: BenchSeries::NoisyCorrected,
                    time_us: t,
                    keep_fraction: q,
                    one_minus_r: 1.0 - corrected_ratio(&raw)?,
                    one_minus_r_std: Some(jackknife_std(&shots, n, corrected_ratio)?),
                });
            }
        }
    }
    Ok(BenchTable {
        name: config.name.clone(),
        n_qubits: problem.graph.n(),
        shots: config.shots,
        params_us: params_us.to_vec(),
        total_duration_us: total,
        keep_fractions,
        rows,
    })
}

/// `1 − R` of the noiseless final state of a schedule.
pub fn exact_final_ratio(config: &ExperimentConfig, params_us: &[f64]) -> Result<f64> {
    let problem = config.validate()?;
    let register = problem.register.as_ref().expect("validated configs have a register");
    let seq = PulseSequence::from_params(params_us, &problem.drive, &config.limits)?;
    let sim = ShotSimulator::new(register, &problem.drive, &crate::noise::NoiseConfig::noiseless())?;
    let probs = sim.exact_probabilities(&seq.segments())?;
    Ok(1.0 - approximation_ratio(&probs, &problem.graph, &problem.cost, problem.mis.size)?)
}
