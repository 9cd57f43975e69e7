//! Experiment orchestration: configuration, simulated shots, the closed
//! optimization loop, run records, sweeps, benchmarks and CSV export.
//!
//! A run is fully determined by its [`ExperimentConfig`], including the
//! master seed. Records are JSON Lines files written step by step; see
//! [`record`] for the layout and [`export`] for the CSV schemas.

pub mod bench;
pub mod benchmarks;
pub mod config;
pub mod experiment;
pub mod export;
pub mod record;
pub mod simulate;
pub mod sweep;

pub use bench::{
    bench_dynamics, even_probe_times, exact_final_ratio, load_sequence_params, BenchRow, BenchSeries, BenchTable,
    SequenceSpec,
};
pub use benchmarks::{benchmark_mask, benchmark_register, BENCHMARK_SIZES, BENCHMARK_SPACING_UM};
pub use config::{DriveConfig, ExperimentConfig, MetricsConfig, Problem, ProblemSource};
pub use experiment::{record_path, replay, replay_matches, run_experiment, Corrected, StepEvaluation, StepEvaluator};
pub use export::{export_figure_data, FigureKind};
pub use record::{
    read_record, read_records, MitigatedDistribution, RecordWriter, RunHeader, RunRecord, StepRecord,
    RECORD_FORMAT_VERSION,
};
pub use simulate::ShotSimulator;
pub use sweep::{aggregate_convergence, sweep, ConvergencePoint, MeanHalfStd, SweepAxis, SweepGroup, DEFAULT_SWEEP_SEEDS};
