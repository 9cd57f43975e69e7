use std::io::Write;

use rydberg_qaoa::bayesopt::BoConfig;
use rydberg_qaoa::mitigation::{DiscardConfig, DiscardMode, MitigationConfig};
use rydberg_qaoa::noise::{Channel, NoiseConfig};
use rydberg_qaoa::runner::{
    aggregate_convergence, export_figure_data, read_record, read_records, replay, replay_matches, run_experiment,
    sweep, ExperimentConfig, FigureKind, MitigatedDistribution, ProblemSource, SweepAxis,
};

fn short_config(n: usize, steps: usize, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(ProblemSource::Benchmark { n, spacing_um: 6.0 });
    cfg.bo = BoConfig {
        init_points: 4,
        steps,
        restarts: 2,
        max_fit_iterations: 30,
        candidates: 256,
        ..BoConfig::default()
    };
    cfg.shots = 32;
    cfg.seed = seed;
    cfg
}

fn noisy(cfg: &mut ExperimentConfig) {
    cfg.noise = NoiseConfig::default();
    cfg.mitigation.spam_correction = true;
}

#[test]
fn noiseless_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_config(4, 8, 3);
    let a = dir.path().join("a.jsonl");
    let b = dir.path().join("b.jsonl");
    run_experiment(&cfg, Some(&a)).unwrap();
    run_experiment(&cfg, Some(&b)).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn noisy_runs_are_reproducible_and_differ_across_seeds() {
    let mut cfg = short_config(4, 6, 9);
    noisy(&mut cfg);
    let a = run_experiment(&cfg, None).unwrap();
    let b = run_experiment(&cfg, None).unwrap();
    assert_eq!(a, b);
    cfg.seed = 10;
    let c = run_experiment(&cfg, None).unwrap();
    assert_ne!(a.steps[0].raw_counts, c.steps[0].raw_counts);
}

#[test]
fn record_has_one_entry_per_step_and_monotone_incumbent() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.jsonl");
    let cfg = short_config(6, 12, 1);
    let live = run_experiment(&cfg, Some(&path)).unwrap();
    let stored = read_record(&path).unwrap();
    assert_eq!(stored, live);
    assert_eq!(stored.steps.len(), 12);
    assert_eq!(stored.header.config, cfg);
    assert_eq!(stored.header.mis_size, 3);
    for (k, s) in stored.steps.iter().enumerate() {
        assert_eq!(s.step, k);
        assert_eq!(s.raw_counts.total_shots(), 32);
        assert_eq!(s.theta_us.len(), 4);
    }
    for w in stored.steps.windows(2) {
        assert!(w[1].incumbent_objective <= w[0].incumbent_objective);
    }
    let best = stored.steps.iter().map(|s| s.objective).fold(f64::INFINITY, f64::min);
    assert_eq!(stored.steps.last().unwrap().incumbent_objective, best);
    // Hyperparameters exist from the first model-driven suggestion onwards.
    assert!(stored.steps[..4].iter().all(|s| s.hyperparams.is_none()));
    assert!(stored.steps[4..].iter().all(|s| s.hyperparams.is_some()));
    assert!(stored.steps[0].distance_from_previous.is_none());
    assert!(stored.steps[1..].iter().all(|s| s.distance_from_previous.unwrap() >= 0.0));
}

#[test]
fn replay_reproduces_stored_metrics_bit_exactly() {
    let mut cfg = short_config(4, 6, 2);
    noisy(&mut cfg);
    cfg.mitigation.discard = DiscardConfig {
        mode: DiscardMode::Fraction,
        keep_fraction: 0.8,
    };
    let record = run_experiment(&cfg, None).unwrap();
    assert!(replay_matches(&record).unwrap());
    let replayed = replay(&record).unwrap();
    assert_eq!(replayed.len(), record.steps.len());
    assert!(record.steps.iter().all(|s| s.metrics.approximation_ratio_std.is_some()));
}

#[test]
fn truncated_record_keeps_completed_steps() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.jsonl");
    run_experiment(&short_config(4, 7, 5), Some(&path)).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 8);
    // Keep the header and three steps, then half of the fourth step line.
    let mut cut = lines[..4].join("\n");
    cut.push('\n');
    cut.push_str(&lines[4][..lines[4].len() / 2]);
    let partial = dir.path().join("partial.jsonl");
    std::fs::File::create(&partial).unwrap().write_all(cut.as_bytes()).unwrap();
    let record = read_record(&partial).unwrap();
    assert_eq!(record.steps.len(), 3);
    assert!(replay_matches(&record).unwrap());
}

#[test]
fn failing_config_aborts_before_any_step() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.jsonl");
    let mut cfg = short_config(4, 6, 0);
    cfg.depth = 9;
    assert!(run_experiment(&cfg, Some(&path)).is_err());
    assert!(!path.exists());
}

#[test]
fn twenty_percent_discard_of_450_shots_keeps_360() {
    let mut cfg = short_config(8, 5, 4);
    cfg.shots = 450;
    cfg.noise = NoiseConfig {
        channels: vec![Channel::StatePrep, Channel::Detection],
        ..NoiseConfig::default()
    };
    cfg.mitigation = MitigationConfig {
        discard: DiscardConfig {
            mode: DiscardMode::Fraction,
            keep_fraction: 0.8,
        },
        ..MitigationConfig::default()
    };
    let record = run_experiment(&cfg, None).unwrap();
    for s in &record.steps {
        assert_eq!(s.retained_shots, Some(360));
        match &s.mitigated {
            MitigatedDistribution::Counts(d) => assert_eq!(d.total_shots(), 360),
            other => panic!("expected counts, got {other:?}"),
        }
        assert!((s.discarded_mass - 0.2).abs() < 1e-12);
    }
}

#[test]
fn blockade_discard_scores_only_independent_sets() {
    let mut cfg = short_config(6, 5, 8);
    cfg.mitigation.discard.mode = DiscardMode::Blockade;
    let record = run_experiment(&cfg, None).unwrap();
    let graph = record.header.graph.build().unwrap();
    for s in &record.steps {
        if let MitigatedDistribution::Counts(d) = &s.mitigated {
            assert!(d.counts().keys().all(|b| graph.is_independent(b)));
            // Independent sets have cost −|z| ≥ −|S*|, so the objective is in [−1, 0].
            assert!(s.objective >= -1.0 - 1e-12 && s.objective <= 0.0);
        }
    }
}

#[test]
fn single_value_single_seed_sweep_is_a_run() {
    let cfg = short_config(4, 6, 21);
    let groups = sweep(&cfg, SweepAxis::Shots, &[32], 1, None).unwrap();
    assert_eq!(groups.len(), 1);
    let rec = &groups[0].records[0];
    let again = run_experiment(&rec.header.config, None).unwrap();
    assert_eq!(&again, rec);
    assert_eq!(rec.header.config.shots, 32);
    assert_eq!(rec.header.config.name.as_deref(), Some("shots=32"));
}

#[test]
fn aggregate_of_identical_runs_is_the_single_trace() {
    let r = run_experiment(&short_config(4, 6, 13), None).unwrap();
    let agg = aggregate_convergence(&[&r, &r, &r]);
    let single = aggregate_convergence(&[&r]);
    assert_eq!(agg.len(), 6);
    for (a, s) in agg.iter().zip(&single) {
        assert_eq!(a.n_runs, 3);
        assert!((a.one_minus_r.mean - s.one_minus_r.mean).abs() < 1e-15);
        assert_eq!(a.one_minus_r.half_std, 0.0);
        assert_eq!(a.fidelity.half_std, 0.0);
    }
}

#[test]
fn shots_sweep_gives_one_trace_per_value() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = short_config(4, 5, 17);
    let groups = sweep(&cfg, SweepAxis::Shots, &[16, 64, 256, 1028], 2, Some(dir.path())).unwrap();
    assert_eq!(groups.len(), 4);
    assert!(groups.iter().all(|g| g.records.len() == 2));
    let out = dir.path().join("convergence.csv");
    export_figure_data(&format!("{}/*.jsonl", dir.path().display()), FigureKind::Convergence, &out).unwrap();
    let mut reader = csv::Reader::from_path(&out).unwrap();
    let series: std::collections::BTreeSet<String> =
        reader.records().map(|r| r.unwrap()[0].to_string()).collect();
    assert_eq!(series.len(), 4);
    assert_eq!(read_records(&format!("{}/*.jsonl", dir.path().display())).unwrap().len(), 8);
}

#[test]
fn size_sweep_requires_a_benchmark_problem() {
    let mut cfg = short_config(4, 5, 0);
    cfg.problem = ProblemSource::Graph(rydberg_qaoa::graph::GraphSpec {
        n: 3,
        edges: vec![(0, 1)],
    });
    assert!(sweep(&cfg, SweepAxis::Size, &[4], 1, None).is_err());
}
