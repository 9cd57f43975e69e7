//! Corrupts a known distribution with readout errors, then recovers it with
//! the inverse transfer map and compares cost-based discarding.

use rydberg_qaoa::dynamics::PulseSequence;
use rydberg_qaoa::metrics::{approximation_ratio, fidelity, truncated_ratio};
use rydberg_qaoa::mitigation::{spam_correct, DEFAULT_EXPANSION_RADIUS};
use rydberg_qaoa::noise::NoiseConfig;
use rydberg_qaoa::runner::{ExperimentConfig, ProblemSource, ShotSimulator};
use rydberg_qaoa::SeedSplitter;

fn main() -> rydberg_qaoa::Result<()> {
    let cfg = ExperimentConfig::new(ProblemSource::Benchmark { n: 6, spacing_um: 6.0 });
    let problem = cfg.validate()?;
    let register = problem.register.as_ref().expect("benchmark problems have a register");
    let seq = PulseSequence::from_params(&[0.6, 0.35, 0.8, 0.25], &problem.drive, &cfg.limits)?;
    let noise = NoiseConfig::detection_only(0.03, 0.08);
    let sim = ShotSimulator::new(register, &problem.drive, &noise)?;
    let model = sim.detection_model().expect("detection errors are enabled").clone();

    let exact = sim.exact_probabilities(&seq.segments())?;
    let raw = sim.sample(&seq.segments(), 5000, &SeedSplitter::new(3), 0)?;
    let corrected = spam_correct(&raw, &model, DEFAULT_EXPANSION_RADIUS)?;
    let (g, c, s) = (&problem.graph, &problem.cost, problem.mis.size);

    println!("{:<12} {:>8} {:>8} {:>8}", "", "F", "1-R", "1-R_80%");
    println!(
        "{:<12} {:>8.4} {:>8.4} {:>8.4}",
        "exact",
        fidelity(&exact, &problem.mis)?,
        1.0 - approximation_ratio(&exact, g, c, s)?,
        1.0 - truncated_ratio(&exact, g, c, s, 0.8)?
    );
    println!(
        "{:<12} {:>8.4} {:>8.4} {:>8.4}",
        "raw",
        fidelity(&raw, &problem.mis)?,
        1.0 - approximation_ratio(&raw, g, c, s)?,
        1.0 - truncated_ratio(&raw, g, c, s, 0.8)?
    );
    println!(
        "{:<12} {:>8.4} {:>8.4} {:>8.4}",
        "corrected",
        fidelity(&corrected, &problem.mis)?,
        1.0 - approximation_ratio(&corrected, g, c, s)?,
        1.0 - truncated_ratio(&corrected, g, c, s, 0.8)?
    );
    Ok(())
}
