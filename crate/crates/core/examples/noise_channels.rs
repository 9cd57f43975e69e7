//! Compares noiseless sampling of one schedule with each noise channel
//! switched on alone.

use rydberg_qaoa::dynamics::PulseSequence;
use rydberg_qaoa::metrics::approximation_ratio;
use rydberg_qaoa::noise::{Channel, NoiseConfig};
use rydberg_qaoa::runner::{ExperimentConfig, ProblemSource, ShotSimulator};
use rydberg_qaoa::SeedSplitter;

fn main() -> rydberg_qaoa::Result<()> {
    let cfg = ExperimentConfig::new(ProblemSource::Benchmark { n: 6, spacing_um: 6.0 });
    let problem = cfg.validate()?;
    let register = problem.register.as_ref().expect("benchmark problems have a register");
    let seq = PulseSequence::from_params(&[0.6, 0.35, 0.8, 0.25], &problem.drive, &cfg.limits)?;
    let seeds = SeedSplitter::new(17);
    let shots = 2000;

    let cases = [
        ("noiseless", vec![]),
        ("state preparation", vec![Channel::StatePrep]),
        ("Doppler", vec![Channel::Doppler]),
        ("Rabi amplitude", vec![Channel::Amplitude]),
        ("detection", vec![Channel::Detection]),
        ("all", NoiseConfig::default().channels),
    ];
    for (label, channels) in cases {
        let noise = NoiseConfig {
            channels,
            ..NoiseConfig::default()
        };
        let sim = ShotSimulator::new(register, &problem.drive, &noise)?;
        let counts = sim.sample(&seq.segments(), shots, &seeds, 0)?;
        let r = approximation_ratio(&counts, &problem.graph, &problem.cost, problem.mis.size)?;
        let mis_fraction: f64 =
            problem.mis.solutions.iter().map(|s| counts.count(s) as f64).sum::<f64>() / shots as f64;
        println!("{label:<18} 1-R = {:.4}  P(MIS) = {mis_fraction:.4}", 1.0 - r);
    }
    Ok(())
}
