//! A small shots sweep written to disk, then exported to the convergence and
//! diagnostics CSV files consumed by the plotting tools.

use rydberg_qaoa::bayesopt::BoConfig;
use rydberg_qaoa::runner::{export_figure_data, sweep, ExperimentConfig, FigureKind, ProblemSource, SweepAxis};

fn main() -> rydberg_qaoa::Result<()> {
    let mut cfg = ExperimentConfig::new(ProblemSource::Benchmark { n: 4, spacing_um: 6.0 });
    cfg.bo = BoConfig {
        init_points: 6,
        steps: 20,
        ..BoConfig::default()
    };
    cfg.seed = 5;
    let dir = std::env::temp_dir().join("rydqaoa_sweep_example");
    let groups = sweep(&cfg, SweepAxis::Shots, &[16, 256], 3, Some(&dir))?;
    for g in &groups {
        let gaps: Vec<String> = g
            .records
            .iter()
            .map(|r| format!("{:.3}", 1.0 - r.final_step().expect("runs have steps").metrics.approximation_ratio))
            .collect();
        println!("shots = {:<4} final 1-R per seed: {}", g.value, gaps.join(", "));
    }
    let pattern = format!("{}/*.jsonl", dir.display());
    for (figure, file) in [(FigureKind::Convergence, "convergence.csv"), (FigureKind::Diagnostics, "diagnostics.csv")] {
        let out = dir.join(file);
        export_figure_data(&pattern, figure, &out)?;
        let text = std::fs::read_to_string(&out).map_err(|e| rydberg_qaoa::Error::Config(e.to_string()))?;
        println!("{}: {} rows; header {}", out.display(), text.lines().count() - 1, text.lines().next().unwrap_or(""));
    }
    Ok(())
}
