//! One short closed-loop optimization on the 6-atom benchmark with the
//! default noise model and readout correction, streamed to a JSONL record.

use rydberg_qaoa::bayesopt::BoConfig;
use rydberg_qaoa::noise::NoiseConfig;
use rydberg_qaoa::runner::{replay_matches, run_experiment, ExperimentConfig, ProblemSource};

fn main() -> rydberg_qaoa::Result<()> {
    let mut cfg = ExperimentConfig::new(ProblemSource::Benchmark { n: 6, spacing_um: 6.0 });
    cfg.name = Some("closed_loop_example".into());
    cfg.noise = NoiseConfig::default();
    cfg.mitigation.spam_correction = true;
    cfg.bo = BoConfig {
        init_points: 10,
        steps: 40,
        ..BoConfig::default()
    };
    cfg.seed = 11;
    let path = std::env::temp_dir().join("closed_loop_example.jsonl");
    let record = run_experiment(&cfg, Some(&path))?;

    println!("{:>4}  {:>9}  {:>9}  {:>7}  {:>7}", "step", "objective", "incumbent", "1-R", "F");
    for s in &record.steps {
        println!(
            "{:>4}  {:>9.4}  {:>9.4}  {:>7.4}  {:>7.4}",
            s.step,
            s.objective,
            s.incumbent_objective,
            1.0 - s.metrics.approximation_ratio,
            s.metrics.fidelity
        );
    }
    let best = record.final_step().expect("the loop ran");
    println!("best schedule (μs): {:?}", best.theta_us);
    println!("record: {}; replay matches: {}", path.display(), replay_matches(&record)?);
    Ok(())
}
