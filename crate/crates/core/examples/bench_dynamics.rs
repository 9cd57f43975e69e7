//! Probes 1 − R along a fixed schedule: exact noiseless values next to
//! sampled values with readout errors, raw and corrected, at q = 100% and 80%.

use rydberg_qaoa::dynamics::PulseSequence;
use rydberg_qaoa::noise::NoiseConfig;
use rydberg_qaoa::runner::{bench_dynamics, even_probe_times, BenchSeries, ExperimentConfig, ProblemSource};

fn main() -> rydberg_qaoa::Result<()> {
    let mut cfg = ExperimentConfig::new(ProblemSource::Benchmark { n: 6, spacing_um: 6.0 });
    cfg.noise = NoiseConfig::detection_only(0.03, 0.08);
    cfg.mitigation.spam_correction = true;
    cfg.shots = 500;
    cfg.seed = 4;
    let params = [0.6, 0.35, 0.8, 0.25];
    let problem = cfg.validate()?;
    let seq = PulseSequence::from_params(&params, &problem.drive, &cfg.limits)?;
    let table = bench_dynamics(&cfg, &params, &even_probe_times(&seq, 9))?;

    for q in [1.0, 0.8] {
        println!("q = {q}");
        let exact = table.series(BenchSeries::Noiseless, q);
        let raw = table.series(BenchSeries::NoisyRaw, q);
        let corrected = table.series(BenchSeries::NoisyCorrected, q);
        for ((e, r), c) in exact.iter().zip(&raw).zip(&corrected) {
            println!(
                "  t = {:.3} μs  noiseless {:.4}  raw {:.4} ± {:.4}  corrected {:.4} ± {:.4}",
                e.time_us,
                e.one_minus_r,
                r.one_minus_r,
                r.one_minus_r_std.unwrap_or(0.0),
                c.one_minus_r,
                c.one_minus_r_std.unwrap_or(0.0)
            );
        }
        for series in [BenchSeries::NoisyRaw, BenchSeries::NoisyCorrected] {
            println!("  mean gap to noiseless, {}: {:.4}", series.label(), table.mean_gap_to_noiseless(series, q).unwrap_or(f64::NAN));
        }
    }
    Ok(())
}
