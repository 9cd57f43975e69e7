//! The closed optimization loop: sample, mitigate, score, suggest.

use std::path::{Path, PathBuf};

use super::config::{ExperimentConfig, Problem};
use super::record::{MitigatedDistribution, RecordWriter, RunHeader, RunRecord, StepRecord, RECORD_FORMAT_VERSION};
use super::simulate::ShotSimulator;
use crate::bayesopt::BayesOptimizer;
use crate::distribution::{BitstringDistribution, Outcomes, ProbabilityDistribution};
use crate::dynamics::PulseSequence;
use crate::error::{Error, Result};
use crate::graph::GraphSpec;
use crate::metrics::{approximation_ratio, jackknife_std, mean_cost, MetricContext, MetricReport};
use crate::mitigation::{spam_correct, Discard, DiscardMode};
use crate::noise::DetectionModel;
use crate::rng::SeedSplitter;

/// Readout-corrected data before discarding.
#[derive(Debug, Clone, PartialEq)]
pub enum Corrected {
    Counts(BitstringDistribution),
    Probabilities(ProbabilityDistribution),
}

/// Everything derived from one step's raw counts.
#[derive(Debug, Clone, PartialEq)]
pub struct StepEvaluation {
    pub corrected: Corrected,
    pub mitigated: MitigatedDistribution,
    pub metrics: MetricReport,
    pub objective: f64,
    pub discarded_mass: f64,
    pub retained_shots: Option<u64>,
}

/// Deterministic post-processing shared by live runs and replays.
#[derive(Debug, Clone)]
pub struct StepEvaluator {
    context: MetricContext,
    correction: Option<(DetectionModel, usize)>,
    discard: DiscardMode,
    keep_fraction: f64,
    jackknife: bool,
}

impl StepEvaluator {
    pub fn new(config: &ExperimentConfig, problem: &Problem) -> Result<Self> {
        let correction = if config.mitigation.spam_correction {
            config
                .noise
                .detection_model(problem.graph.n())?
                .map(|m| (m, config.mitigation.expansion_radius))
        } else {
            None
        };
        Ok(Self {
            context: problem.metric_context(&config.metrics),
            correction,
            discard: config.mitigation.discard.mode,
            keep_fraction: config.mitigation.discard.keep_fraction,
            jackknife: config.metrics.jackknife,
        })
    }

    pub fn context(&self) -> &MetricContext {
        &self.context
    }

    pub fn correct(&self, raw: &BitstringDistribution) -> Result<Corrected> {
        Ok(match &self.correction {
            Some((model, radius)) => Corrected::Probabilities(spam_correct(raw, model, *radius)?),
            None => Corrected::Counts(raw.clone()),
        })
    }

    fn ratio_of_corrected(&self, raw: &BitstringDistribution) -> Result<f64> {
        let ctx = &self.context;
        match self.correct(raw)? {
            Corrected::Counts(d) => approximation_ratio(&d, &ctx.graph, &ctx.cost, ctx.mis.size),
            Corrected::Probabilities(d) => approximation_ratio(&d, &ctx.graph, &ctx.cost, ctx.mis.size),
        }
    }

    fn discard_and_score<D: Discard + Clone>(&self, d: &D) -> Result<(Option<D>, f64)> {
        let kept = match self.discard {
            DiscardMode::None => Some(d.clone()),
            DiscardMode::Fraction => Some(d.keep_lowest_cost(self.keep_fraction, &self.context.graph, &self.context.cost)?),
            DiscardMode::Blockade => d.retain(|b| self.context.graph.is_independent(b)),
        };
        let objective = match &kept {
            Some(k) => mean_cost(k, &self.context.graph, &self.context.cost)? / self.context.mis.size as f64,
            None => 0.0,
        };
        Ok((kept, objective))
    }

    pub fn evaluate(&self, raw: &BitstringDistribution) -> Result<StepEvaluation> {
        let corrected = self.correct(raw)?;
        let mut metrics = match &corrected {
            Corrected::Counts(d) => self.context.evaluate(d)?,
            Corrected::Probabilities(d) => self.context.evaluate(d)?,
        };
        if self.jackknife && raw.total_shots() >= 2 {
            metrics.approximation_ratio_std =
                Some(jackknife_std(&raw.shots(), raw.n_qubits(), |d| self.ratio_of_corrected(d))?);
        }
        let (mitigated, objective, discarded_mass, retained_shots) = match &corrected {
            Corrected::Counts(d) => {
                let (kept, obj) = self.discard_and_score(d)?;
                let retained = kept.as_ref().map_or(0, |k| k.total_shots());
                let mass = 1.0 - retained as f64 / d.total_shots() as f64;
                let mitigated = kept.map_or(MitigatedDistribution::Empty, MitigatedDistribution::Counts);
                (mitigated, obj, mass, Some(retained))
            }
            Corrected::Probabilities(d) => {
                let (kept, obj) = self.discard_and_score(d)?;
                let mass = match (self.discard, &kept) {
                    (DiscardMode::None, _) => 0.0,
                    (DiscardMode::Fraction, _) => 1.0 - self.keep_fraction,
                    (DiscardMode::Blockade, _) => d
                        .probabilities()
                        .iter()
                        .filter(|(b, _)| !self.context.graph.is_independent(b))
                        .map(|(_, p)| p)
                        .sum(),
                };
                let mitigated = kept.map_or(MitigatedDistribution::Empty, MitigatedDistribution::Probabilities);
                (mitigated, obj, mass, None)
            }
        };
        Ok(StepEvaluation {
            corrected,
            mitigated,
            metrics,
            objective,
            discarded_mass,
            retained_shots,
        })
    }
}

/// Default record file for a config inside `dir`.
pub fn record_path(config: &ExperimentConfig, dir: &Path) -> PathBuf {
    let name = config.name.as_deref().unwrap_or("run");
    let safe: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect();
    dir.join(format!("{safe}_seed{}.jsonl", config.seed))
}

fn header(config: &ExperimentConfig, problem: &Problem) -> Result<RunHeader> {
    Ok(RunHeader {
        format_version: RECORD_FORMAT_VERSION,
        code_version: env!("CARGO_PKG_VERSION").to_string(),
        config: config.clone(),
        n_qubits: problem.graph.n(),
        graph: GraphSpec::from(&problem.graph),
        mis_size: problem.mis.size,
        mis_solutions: problem.mis.solutions.clone(),
        search_space: config.search_space(&problem.drive)?,
        initial_pulse_us: problem.drive.initial_pulse_us(),
    })
}

/// Runs one closed loop. When `out` is given the record is streamed to that
/// file; after a failure mid-run the file holds every completed step.
pub fn run_experiment(config: &ExperimentConfig, out: Option<&Path>) -> Result<RunRecord> {
    let problem = config.validate()?;
    let register = problem.register.as_ref().expect("validated configs have a register");
    let simulator = ShotSimulator::new(register, &problem.drive, &config.noise)?;
    let evaluator = StepEvaluator::new(config, &problem)?;
    let header = header(config, &problem)?;
    let mut writer = out.map(|p| RecordWriter::create(p, &header)).transpose()?;
    let seeds = SeedSplitter::new(config.seed);
    let mut optimizer = BayesOptimizer::new(header.search_space.clone(), config.bo.clone(), config.seed)?;
    let mut steps = Vec::with_capacity(config.bo.steps);

    while !optimizer.is_finished() {
        let step = optimizer.state().len();
        let theta = optimizer.ask()?;
        let evaluation = PulseSequence::from_params(&theta, &problem.drive, &config.limits)
            .and_then(|seq| simulator.sample(&seq.segments(), config.shots, &seeds, step as u64))
            .and_then(|raw| evaluator.evaluate(&raw).map(|e| (raw, e)));
        let (raw, eval) = evaluation.map_err(|e| Error::Objective {
            step,
            message: e.to_string(),
        })?;
        let bo_step = optimizer.tell(eval.objective)?;
        let record = StepRecord {
            step,
            theta_us: theta,
            raw_counts: raw,
            mitigated: eval.mitigated,
            metrics: eval.metrics,
            objective: eval.objective,
            discarded_mass: eval.discarded_mass,
            retained_shots: eval.retained_shots,
            hyperparams: bo_step.hyperparams,
            distance_from_previous: bo_step.distance_from_previous,
            incumbent_objective: bo_step.incumbent,
            incumbent_step: bo_step.incumbent_step,
        };
        if let Some(w) = writer.as_mut() {
            w.append(&record)?;
        }
        steps.push(record);
    }
    Ok(RunRecord { header, steps })
}

/// Recomputes every step's metrics and objective from the stored raw counts.
pub fn replay(record: &RunRecord) -> Result<Vec<StepEvaluation>> {
    let problem = Problem::build(&record.header.config)?;
    let evaluator = StepEvaluator::new(&record.header.config, &problem)?;
    record.steps.iter().map(|s| evaluator.evaluate(&s.raw_counts)).collect()
}

/// True when the replayed metrics, objectives and mitigated data match the
/// stored ones exactly.
pub fn replay_matches(record: &RunRecord) -> Result<bool> {
    Ok(replay(record)?.iter().zip(&record.steps).all(|(e, s)| {
        e.metrics == s.metrics
            && e.objective.to_bits() == s.objective.to_bits()
            && e.mitigated == s.mitigated
            && e.discarded_mass.to_bits() == s.discarded_mass.to_bits()
    }))
}
