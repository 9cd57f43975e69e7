//! Fits a Matérn-3/2 Gaussian process to a few samples of a 1D function and
//! then minimizes a 2D function with the full Bayesian optimization loop.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rydberg_qaoa::bayesopt::{bo_loop, expected_improvement, gp_fit, BoConfig, FitOptions, GpPosterior, SearchSpace, TrainingSet};

fn main() -> rydberg_qaoa::Result<()> {
    let f = |x: f64| (6.0 * x).sin() + 0.5 * x;
    let inputs: Vec<Vec<f64>> = [0.0, 0.12, 0.25, 0.4, 0.55, 0.7, 0.85, 1.0].iter().map(|&x| vec![x]).collect();
    let outputs = inputs.iter().map(|x| f(x[0])).collect();
    let data = TrainingSet::new(inputs, outputs)?;
    let hp = gp_fit(&data, &FitOptions::default(), None, &mut ChaCha8Rng::seed_from_u64(1))?;
    println!("fitted ℓ = {:.3}, σ² = {:.3}, σ_N² = {:.2e}", hp.correlation_length, hp.signal_variance, hp.noise_variance);
    let model = GpPosterior::new(data, hp)?;
    let f_best = model.data().standardized_outputs().iter().copied().fold(f64::INFINITY, f64::min);
    for k in 0..=10 {
        let x = k as f64 / 10.0;
        let (m, v) = model.predict_raw(&[x])?;
        let ei = expected_improvement(&model, &[x], f_best)?;
        println!("x = {x:.1}  f = {:>7.4}  μ = {m:>7.4}  σ = {:.4}  EI = {ei:.4}", f(x), v.sqrt());
    }

    let space = SearchSpace::new(vec![0.0, 0.0], vec![1.0, 1.0], 1.5)?;
    let config = BoConfig {
        init_points: 8,
        steps: 40,
        ..BoConfig::default()
    };
    let state = bo_loop(space, config, 7, |x| Ok((x[0] - 0.3).powi(2) + (x[1] - 0.6).powi(2) + 0.1 * (9.0 * x[0]).cos()))?;
    let best = state.incumbent().expect("the loop ran");
    println!("best after {} steps: θ = {:?}, f = {:.5} (step {})", state.len(), best.theta, best.y, best.step);
    Ok(())
}
