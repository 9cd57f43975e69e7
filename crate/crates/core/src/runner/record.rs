//! JSON Lines run records: one header line followed by one line per step.
//!
//! Each line is a JSON object tagged by `"type"` (`"header"` or `"step"`).
//! Lines are flushed as soon as a step completes, so an interrupted run
//! leaves a readable record of the steps that finished.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::config::ExperimentConfig;
use crate::bayesopt::{GpHyperparams, SearchSpace};
use crate::bitstring::Bitstring;
use crate::distribution::{BitstringDistribution, ProbabilityDistribution};
use crate::error::{Error, Result};
use crate::graph::GraphSpec;
use crate::metrics::MetricReport;

pub const RECORD_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunHeader {
    pub format_version: u32,
    pub code_version: String,
    /// Exact configuration, including the master seed.
    pub config: ExperimentConfig,
    pub n_qubits: usize,
    pub graph: GraphSpec,
    pub mis_size: usize,
    pub mis_solutions: Vec<Bitstring>,
    pub search_space: SearchSpace,
    pub initial_pulse_us: f64,
}

/// Distribution the objective was computed from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MitigatedDistribution {
    Counts(BitstringDistribution),
    Probabilities(ProbabilityDistribution),
    /// Discarding removed every outcome.
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub theta_us: Vec<f64>,
    pub raw_counts: BitstringDistribution,
    pub mitigated: MitigatedDistribution,
    /// Figures of merit of the readout-corrected distribution before discarding.
    pub metrics: MetricReport,
    /// Mean classical cost of the mitigated distribution divided by `|S*|`.
    pub objective: f64,
    /// Probability mass removed by discarding.
    pub discarded_mass: f64,
    /// Shots left after discarding, when the mitigated data are still counts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub retained_shots: Option<u64>,
    pub hyperparams: Option<GpHyperparams>,
    /// Unit-cube distance to the previous step's parameters.
    pub distance_from_previous: Option<f64>,
    pub incumbent_objective: f64,
    pub incumbent_step: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
enum RecordLine {
    Header(Box<RunHeader>),
    Step(Box<StepRecord>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub header: RunHeader,
    pub steps: Vec<StepRecord>,
}

impl RunRecord {
    /// The best step found by the end of the run.
    pub fn final_step(&self) -> Option<&StepRecord> {
        self.steps.last().map(|s| &self.steps[s.incumbent_step])
    }

    /// For each step, the incumbent step at that point.
    pub fn incumbent_trace(&self) -> impl Iterator<Item = &StepRecord> + '_ {
        self.steps.iter().map(|s| &self.steps[s.incumbent_step])
    }

    /// Series label: the configured name, else `fallback`.
    pub fn series_name(&self, fallback: &str) -> String {
        self.header.config.name.clone().unwrap_or_else(|| fallback.to_string())
    }
}

/// Single writer appending to a record file.
pub struct RecordWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl RecordWriter {
    /// Creates (or truncates) `path` and writes the header line.
    pub fn create(path: impl AsRef<Path>, header: &RunHeader) -> Result<Self> {
        let path = path.as_ref().to_path_buf();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        }
        let file = File::create(&path).map_err(|e| Error::io(&path, e))?;
        let mut w = Self {
            path,
            out: BufWriter::new(file),
        };
        w.write_line(&RecordLine::Header(Box::new(header.clone())))?;
        Ok(w)
    }

    pub fn append(&mut self, step: &StepRecord) -> Result<()> {
        self.write_line(&RecordLine::Step(Box::new(step.clone())))
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    fn write_line(&mut self, line: &RecordLine) -> Result<()> {
        serde_json::to_writer(&mut self.out, line)?;
        self.out.write_all(b"\n").map_err(|e| Error::io(&self.path, e))?;
        self.out.flush().map_err(|e| Error::io(&self.path, e))
    }
}

/// Reads a record. A truncated final line, left by an interrupted write, is ignored.
pub fn read_record(path: impl AsRef<Path>) -> Result<RunRecord> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let lines: Vec<String> = BufReader::new(file)
        .lines()
        .collect::<std::io::Result<_>>()
        .map_err(|e| Error::io(path, e))?;
    let mut header = None;
    let mut steps = Vec::new();
    let last = lines.len().saturating_sub(1);
    for (i, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: RecordLine = match serde_json::from_str(line) {
            Ok(l) => l,
            Err(_) if i == last && header.is_some() => break,
            Err(e) => return Err(Error::Config(format!("{}:{}: {e}", path.display(), i + 1))),
        };
        match parsed {
            RecordLine::Header(h) if header.is_none() => header = Some(*h),
            RecordLine::Header(_) => {
                return Err(Error::Config(format!("{}: second header at line {}", path.display(), i + 1)))
            }
            RecordLine::Step(s) => steps.push(*s),
        }
    }
    let header = header.ok_or_else(|| Error::Config(format!("{}: missing header line", path.display())))?;
    Ok(RunRecord { header, steps })
}

/// Reads every record matching a glob pattern, sorted by path.
pub fn read_records(pattern: &str) -> Result<Vec<(PathBuf, RunRecord)>> {
    glob_paths(pattern)?
        .into_iter()
        .map(|p| read_record(&p).map(|r| (p, r)))
        .collect()
}

/// Paths matching a glob pattern, sorted.
pub(crate) fn glob_paths(pattern: &str) -> Result<Vec<PathBuf>> {
    let mut paths: Vec<PathBuf> = glob::glob(pattern)
        .map_err(|e| Error::Config(format!("bad glob {pattern:?}: {e}")))?
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| Error::io(e.path().to_path_buf(), e.into()))?;
    paths.sort();
    Ok(paths)
}
