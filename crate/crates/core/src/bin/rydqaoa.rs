//! Command-line front end: closed-loop runs, sweeps, schedule benchmarks,
//! CSV export and the MIS oracle.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Deserialize;
use statrs::statistics::{Data, Median};

use rydberg_qaoa::dynamics::{PulseSequence, C6_RB87_60S, TWO_PI};
use rydberg_qaoa::graph::{blockade_radius, brute_force_mis, edges_from_register, Graph, GraphSpec, RegisterSpec};
use rydberg_qaoa::runner::{
    bench_dynamics, even_probe_times, export_figure_data, load_sequence_params, record_path, run_experiment, sweep,
    ExperimentConfig, FigureKind, RunRecord, SweepAxis, DEFAULT_SWEEP_SEEDS,
};
use rydberg_qaoa::{Error, Result};

#[derive(Parser)]
#[command(name = "rydqaoa", version, about = "Analog QAOA for MIS on simulated Rydberg registers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one closed optimization loop and write its JSONL record.
    Run {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Output directory; defaults to the config's `output_dir`, else `runs`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeat runs over graph sizes or shot counts.
    Sweep {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// `size` (benchmark atom count) or `shots`.
        #[arg(long)]
        axis: SweepAxis,
        /// Comma-separated axis values.
        #[arg(long, num_args = 1.., value_delimiter = ',', required = true)]
        values: Vec<u64>,
        /// Runs per value, each with its own derived seed.
        #[arg(long, default_value_t = DEFAULT_SWEEP_SEEDS)]
        seeds: usize,
        /// Record directory; defaults to the config's `output_dir`, else `runs`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Probe 1 − R along a fixed schedule, noiseless versus sampled.
    Bench {
        /// Experiment config (JSON).
        #[arg(long)]
        config: PathBuf,
        /// `{"params_us": [...]}` file, or a run record whose best schedule is used.
        #[arg(long)]
        sequence: PathBuf,
        /// Probe times in μs from the start of the schedule.
        #[arg(long, num_args = 1.., value_delimiter = ',', conflicts_with = "probes")]
        times: Vec<f64>,
        /// Number of evenly spaced probes after the initial pulse, used when `--times` is absent.
        #[arg(long, default_value_t = 11)]
        probes: usize,
        /// Output table (JSON); defaults to `<output dir>/<name>_bench.json`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Flatten records or bench tables into a plotting CSV.
    Export {
        /// Glob over run records (`.jsonl`) or bench tables (`.json`).
        #[arg(long)]
        records: String,
        /// `convergence`, `diagnostics` or `dynamics`.
        #[arg(long)]
        figure: FigureKind,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Print every maximum independent set of a graph or register file.
    Mis {
        /// JSON with `n` and `edges`, `positions_um`, or `lattice_mask` and `spacing_um`.
        #[arg(long)]
        graph: PathBuf,
    },
}

fn output_dir(config: &ExperimentConfig, out: Option<PathBuf>) -> PathBuf {
    out.or_else(|| config.output_dir.clone()).unwrap_or_else(|| PathBuf::from("runs"))
}

fn summarize(record: &RunRecord) -> String {
    match record.final_step() {
        Some(best) => format!(
            "best step {:>4}  objective {:.4}  1-R {:.4}  F {:.4}  S_r {}  theta_us {:?}",
            best.step,
            best.objective,
            1.0 - best.metrics.approximation_ratio,
            best.metrics.fidelity,
            best.metrics.solution_ratio,
            best.theta_us
        ),
        None => "no steps".into(),
    }
}

fn cmd_run(config: &Path, seed: Option<u64>, out: Option<PathBuf>) -> Result<()> {
    let mut cfg = ExperimentConfig::load(config)?;
    if let Some(s) = seed {
        cfg.seed = s;
    }
    let path = record_path(&cfg, &output_dir(&cfg, out));
    let record = run_experiment(&cfg, Some(&path))?;
    println!("{}: {} steps", path.display(), record.steps.len());
    println!("{}", summarize(&record));
    Ok(())
}

fn cmd_sweep(config: &Path, axis: SweepAxis, values: &[u64], seeds: usize, out: Option<PathBuf>) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    let dir = output_dir(&cfg, out);
    let groups = sweep(&cfg, axis, values, seeds, Some(&dir))?;
    println!("records in {}", dir.display());
    for g in &groups {
        let final_gaps: Vec<f64> = g
            .records
            .iter()
            .filter_map(|r| r.final_step().map(|s| 1.0 - s.metrics.approximation_ratio))
            .collect();
        let median = Data::new(final_gaps).median();
        println!("{}={:<6} runs {:>3}  median final 1-R {:.4}", axis.label(), g.value, g.records.len(), median);
    }
    Ok(())
}

fn cmd_bench(config: &Path, sequence: &Path, times: &[f64], probes: usize, out: Option<PathBuf>) -> Result<()> {
    let cfg = ExperimentConfig::load(config)?;
    let params = load_sequence_params(sequence)?;
    let times = if times.is_empty() {
        let problem = cfg.validate()?;
        let seq = PulseSequence::from_params(&params, &problem.drive, &cfg.limits)?;
        even_probe_times(&seq, probes)
    } else {
        times.to_vec()
    };
    let table = bench_dynamics(&cfg, &params, &times)?;
    let path = out.unwrap_or_else(|| {
        let name = cfg.name.as_deref().unwrap_or("bench");
        output_dir(&cfg, None).join(format!("{name}_bench.json"))
    });
    table.save(&path)?;
    println!("{}", path.display());
    for row in &table.rows {
        let std = row.one_minus_r_std.map_or_else(String::new, |s| format!(" ± {s:.4}"));
        println!(
            "{:<16} q={:<4} t={:>6.3} μs  1-R {:.4}{std}",
            row.series.label(),
            row.keep_fraction,
            row.time_us,
            row.one_minus_r
        );
    }
    Ok(())
}

#[derive(Deserialize)]
#[serde(untagged)]
enum GraphFile {
    Graph(GraphSpec),
    Register(RegisterSpec),
}

/// Registers are turned into graphs with the blockade radius at Ω/2π = 1 MHz.
fn load_graph(path: &Path) -> Result<Graph> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    let file: GraphFile = serde_json::from_str(&text)
        .map_err(|_| Error::Config(format!("{}: expected a graph {{n, edges}} or a register", path.display())))?;
    match file {
        GraphFile::Graph(spec) => spec.build(),
        GraphFile::Register(spec) => {
            edges_from_register(&spec.build()?, blockade_radius(C6_RB87_60S, TWO_PI)?)
        }
    }
}

fn cmd_mis(path: &Path) -> Result<()> {
    let graph = load_graph(path)?;
    let mis = brute_force_mis(&graph)?;
    println!("vertices {}  edges {}  |S*| {}", graph.n(), graph.edge_count(), mis.size);
    for s in &mis.solutions {
        println!("{s}");
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { config, seed, out } => cmd_run(&config, seed, out),
        Command::Sweep {
            config,
            axis,
            values,
            seeds,
            out,
        } => cmd_sweep(&config, axis, &values, seeds, out),
        Command::Bench {
            config,
            sequence,
            times,
            probes,
            out,
        } => cmd_bench(&config, &sequence, &times, probes, out),
        Command::Export { records, figure, out } => export_figure_data(&records, figure, &out),
        Command::Mis { graph } => cmd_mis(&graph),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
