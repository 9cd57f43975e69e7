//! Flat CSV exports for plotting.
//!
//! | figure        | columns |
//! |---------------|---------|
//! | `convergence` | `series,step,n_runs,one_minus_R,one_minus_R_half_std,F,F_half_std,S_r,S_r_half_std` |
//! | `diagnostics` | `series,step,ell,sigma_sq,sigma_N_sq,D_next` |
//! | `dynamics`    | `table,series,time_us,keep_fraction,one_minus_R,one_minus_R_std` |
//!
//! Convergence rows aggregate all records sharing a series name (the
//! configured `name`, else the file stem). Diagnostics rows are per record,
//! labelled by file stem; hyperparameters are empty for initial-design steps
//! and `D_next` is empty on the last step. Dynamics rows come from bench
//! tables; `one_minus_R_std` is empty for exact series.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::bench::BenchTable;
use super::record::{glob_paths, read_records, RunRecord};
use super::sweep::aggregate_convergence;
use crate::error::{Error, Result};

pub const CONVERGENCE_COLUMNS: [&str; 9] = [
    "series",
    "step",
    "n_runs",
    "one_minus_R",
    "one_minus_R_half_std",
    "F",
    "F_half_std",
    "S_r",
    "S_r_half_std",
];
pub const DIAGNOSTICS_COLUMNS: [&str; 6] = ["series", "step", "ell", "sigma_sq", "sigma_N_sq", "D_next"];
pub const DYNAMICS_COLUMNS: [&str; 6] = ["table", "series", "time_us", "keep_fraction", "one_minus_R", "one_minus_R_std"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FigureKind {
    Convergence,
    Dynamics,
    Diagnostics,
}

impl std::str::FromStr for FigureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convergence" => Ok(FigureKind::Convergence),
            "dynamics" => Ok(FigureKind::Dynamics),
            "diagnostics" => Ok(FigureKind::Diagnostics),
            other => Err(Error::Config(format!(
                "unknown figure kind {other:?}; use convergence, dynamics or diagnostics"
            ))),
        }
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| x.to_string())
}

fn writer(out: &Path, columns: &[&str]) -> Result<csv::Writer<std::fs::File>> {
    if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let mut w = csv::Writer::from_path(out)?;
    w.write_record(columns)?;
    Ok(w)
}

pub fn write_convergence(records: &[(PathBuf, RunRecord)], out: &Path) -> Result<()> {
    let mut groups: BTreeMap<String, Vec<&RunRecord>> = BTreeMap::new();
    for (path, r) in records {
        groups.entry(r.series_name(&stem(path))).or_default().push(r);
    }
    let mut w = writer(out, &CONVERGENCE_COLUMNS)?;
    for (series, runs) in &groups {
        for p in aggregate_convergence(runs) {
            w.write_record([
                series.clone(),
                p.step.to_string(),
                p.n_runs.to_string(),
                p.one_minus_r.mean.to_string(),
                p.one_minus_r.half_std.to_string(),
                p.fidelity.mean.to_string(),
                p.fidelity.half_std.to_string(),
                p.solution_ratio.mean.to_string(),
                p.solution_ratio.half_std.to_string(),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(out, e))
}

pub fn write_diagnostics(records: &[(PathBuf, RunRecord)], out: &Path) -> Result<()> {
    let mut w = writer(out, &DIAGNOSTICS_COLUMNS)?;
    for (path, r) in records {
        let series = stem(path);
        for (i, s) in r.steps.iter().enumerate() {
            let hp = s.hyperparams;
            let d_next = r.steps.get(i + 1).and_then(|n| n.distance_from_previous);
            w.write_record([
                series.clone(),
                s.step.to_string(),
                opt(hp.map(|h| h.correlation_length)),
                opt(hp.map(|h| h.signal_variance)),
                opt(hp.map(|h| h.noise_variance)),
                opt(d_next),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(out, e))
}

pub fn write_dynamics(tables: &[(PathBuf, BenchTable)], out: &Path) -> Result<()> {
    let mut w = writer(out, &DYNAMICS_COLUMNS)?;
    for (path, t) in tables {
        let name = t.name.clone().unwrap_or_else(|| stem(path));
        for row in &t.rows {
            w.write_record([
                name.clone(),
                row.series.label().to_string(),
                row.time_us.to_string(),
                row.keep_fraction.to_string(),
                row.one_minus_r.to_string(),
                opt(row.one_minus_r_std),
            ])?;
        }
    }
    w.flush().map_err(|e| Error::io(out, e))
}

/// Exports the files matching `pattern` (run records, or bench tables for
/// `dynamics`) as one CSV. No matches give a header-only file.
pub fn export_figure_data(pattern: &str, figure: FigureKind, out: &Path) -> Result<()> {
    match figure {
        FigureKind::Convergence => write_convergence(&read_records(pattern)?, out),
        FigureKind::Diagnostics => write_diagnostics(&read_records(pattern)?, out),
        FigureKind::Dynamics => {
            let tables = glob_paths(pattern)?
                .into_iter()
                .map(|p| BenchTable::load(&p).map(|t| (p, t)))
                .collect::<Result<Vec<_>>>()?;
            write_dynamics(&tables, out)
        }
    }
}
