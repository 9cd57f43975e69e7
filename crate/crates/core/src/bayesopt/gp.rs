use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rayon::prelude::*;

use super::design::ScrambledHalton;
use super::kernel::{euclidean, matern32_r, GpHyperparams, HyperparamBounds};
use crate::error::{Error, Result};

const DUPLICATE_TOLERANCE: f64 = 1e-12;
const JITTER_LADDER: [f64; 6] = [0.0, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6];

/// Observations `{λ_i, y_i}` with inputs in the unit cube and outputs
/// standardized to zero mean and unit variance.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSet {
    inputs: Vec<Vec<f64>>,
    outputs: Vec<f64>,
    standardized: DVector<f64>,
    mean: f64,
    scale: f64,
}

impl TrainingSet {
    pub fn new(inputs: Vec<Vec<f64>>, outputs: Vec<f64>) -> Result<Self> {
        if inputs.len() != outputs.len() {
            return Err(Error::LengthMismatch {
                expected: inputs.len(),
                found: outputs.len(),
            });
        }
        if inputs.is_empty() {
            return Err(Error::Domain("training set is empty".into()));
        }
        let dim = inputs[0].len();
        for (i, x) in inputs.iter().enumerate() {
            if x.len() != dim {
                return Err(Error::LengthMismatch {
                    expected: dim,
                    found: x.len(),
                });
            }
            if x.iter().any(|v| !v.is_finite()) || !outputs[i].is_finite() {
                return Err(Error::Domain(format!("training point {i} is not finite")));
            }
            for (j, other) in inputs[..i].iter().enumerate() {
                if euclidean(x, other) <= DUPLICATE_TOLERANCE {
                    return Err(Error::Domain(format!(
                        "training inputs {j} and {i} coincide"
                    )));
                }
            }
        }
        let n = outputs.len() as f64;
        let mean = outputs.iter().sum::<f64>() / n;
        let std = (outputs.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n).sqrt();
        let scale = if std > 1e-12 * mean.abs().max(1.0) { std } else { 1.0 };
        let standardized = DVector::from_iterator(outputs.len(), outputs.iter().map(|y| (y - mean) / scale));
        Ok(Self {
            inputs,
            outputs,
            standardized,
            mean,
            scale,
        })
    }

    pub fn len(&self) -> usize {
        self.outputs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.outputs.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs[0].len()
    }

    pub fn inputs(&self) -> &[Vec<f64>] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    pub fn standardized_outputs(&self) -> &[f64] {
        self.standardized.as_slice()
    }

    pub fn to_standard(&self, y: f64) -> f64 {
        (y - self.mean) / self.scale
    }

    pub fn from_standard(&self, z: f64) -> f64 {
        z * self.scale + self.mean
    }

    /// `(mean, scale)` of the standardization.
    pub fn standardization(&self) -> (f64, f64) {
        (self.mean, self.scale)
    }

    fn distances(&self) -> DMatrix<f64> {
        let n = self.len();
        DMatrix::from_fn(n, n, |i, j| euclidean(&self.inputs[i], &self.inputs[j]))
    }
}

fn kernel_matrix(dist: &DMatrix<f64>, hp: &GpHyperparams, jitter: f64) -> DMatrix<f64> {
    let n = dist.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        let k = matern32_r(dist[(i, j)], hp);
        if i == j {
            k + hp.noise_variance + jitter
        } else {
            k
        }
    })
}

/// Cholesky factor of `K`, escalating diagonal jitter from 0 up to 1e-6.
fn factorize(dist: &DMatrix<f64>, hp: &GpHyperparams) -> Result<(Cholesky<f64, Dyn>, f64)> {
    for jitter in JITTER_LADDER {
        if let Some(chol) = Cholesky::new(kernel_matrix(dist, hp, jitter)) {
            return Ok((chol, jitter));
        }
    }
    Err(Error::Fit(format!(
        "kernel matrix is not positive definite with jitter up to 1e-6 at {hp:?}"
    )))
}

/// Log marginal likelihood of the standardized outputs and its gradient with
/// respect to `[ln ℓ, ln σ², ln σ_N²]`.
pub fn log_marginal_likelihood(data: &TrainingSet, hp: &GpHyperparams) -> Result<(f64, [f64; 3])> {
    Lml::new(data).eval(hp)
}

struct Lml<'a> {
    dist: DMatrix<f64>,
    y: &'a DVector<f64>,
}

impl<'a> Lml<'a> {
    fn new(data: &'a TrainingSet) -> Self {
        Self {
            dist: data.distances(),
            y: &data.standardized,
        }
    }

    fn eval(&self, hp: &GpHyperparams) -> Result<(f64, [f64; 3])> {
        let (lml, chol, alpha) = self.value(hp)?;
        Ok((lml, self.gradient(hp, &chol, &alpha)))
    }

    fn value(&self, hp: &GpHyperparams) -> Result<(f64, Cholesky<f64, Dyn>, DVector<f64>)> {
        let n = self.y.len();
        let (chol, _) = factorize(&self.dist, hp)?;
        let alpha = chol.solve(self.y);
        let log_det: f64 = chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum::<f64>() * 2.0;
        let lml = -0.5 * self.y.dot(&alpha) - 0.5 * log_det
            - 0.5 * n as f64 * (2.0 * std::f64::consts::PI).ln();
        if !lml.is_finite() {
            return Err(Error::Fit(format!("log marginal likelihood is not finite at {hp:?}")));
        }
        Ok((lml, chol, alpha))
    }

    /// ∂LML/∂θ = ½ tr((ααᵀ − K⁻¹) ∂K/∂θ) in log parameters.
    fn gradient(&self, hp: &GpHyperparams, chol: &Cholesky<f64, Dyn>, alpha: &DVector<f64>) -> [f64; 3] {
        let n = alpha.len();
        let k_inv = chol.inverse();
        let sqrt3 = 3f64.sqrt();
        let mut grad = [0.0; 3];
        for i in 0..n {
            let w = alpha[i] * alpha[i] - k_inv[(i, i)];
            grad[1] += 0.5 * w * hp.signal_variance;
            grad[2] += 0.5 * w * hp.noise_variance;
            for j in 0..i {
                let w = alpha[i] * alpha[j] - k_inv[(i, j)];
                let s = sqrt3 * self.dist[(i, j)] / hp.correlation_length;
                let e = (-s).exp();
                grad[0] += w * hp.signal_variance * s * s * e;
                grad[1] += w * hp.signal_variance * (1.0 + s) * e;
            }
        }
        grad
    }
}

/// Settings for the multi-start likelihood maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub bounds: HyperparamBounds,
    pub restarts: usize,
    pub max_iterations: usize,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            bounds: HyperparamBounds::default(),
            restarts: 8,
            max_iterations: 100,
        }
    }
}

fn project(u: &[f64; 3], lims: &[[f64; 2]; 3]) -> [f64; 3] {
    std::array::from_fn(|k| u[k].clamp(lims[k][0], lims[k][1]))
}

/// Projected gradient ascent with backtracking line search. Trial points
/// only factorize; the gradient is formed once a step is accepted.
fn ascend(problem: &Lml, start: [f64; 3], lims: &[[f64; 2]; 3], max_iterations: usize) -> Option<(f64, [f64; 3])> {
    const MIN_GAIN: f64 = 1e-7;
    let mut u = project(&start, lims);
    let (mut f, mut g) = problem.eval(&GpHyperparams::from_log(&u)).ok()?;
    let mut step = 1.0 / (1.0 + g.iter().map(|x| x * x).sum::<f64>().sqrt());
    for _ in 0..max_iterations {
        let mut moved = false;
        while step > 1e-12 {
            let cand = project(&std::array::from_fn(|k| u[k] + step * g[k]), lims);
            let d: [f64; 3] = std::array::from_fn(|k| cand[k] - u[k]);
            let dist = d.iter().map(|x| x * x).sum::<f64>().sqrt();
            if dist < 1e-10 {
                return Some((f, u));
            }
            let decrease: f64 = d.iter().zip(&g).map(|(a, b)| a * b).sum();
            let hp = GpHyperparams::from_log(&cand);
            match problem.value(&hp) {
                Ok((fc, chol, alpha)) if fc >= f + 1e-4 * decrease => {
                    moved = fc - f > MIN_GAIN;
                    u = cand;
                    f = fc;
                    g = problem.gradient(&hp, &chol, &alpha);
                    step *= 2.0;
                    break;
                }
                _ => step *= 0.5,
            }
        }
        if !moved {
            break;
        }
    }
    Some((f, u))
}

/// Maximizes the log marginal likelihood over the hyperparameter box from
/// space-filling starting points plus an optional warm start. Deterministic
/// for a given `rng` state.
pub fn gp_fit(
    data: &TrainingSet,
    options: &FitOptions,
    warm_start: Option<&GpHyperparams>,
    rng: &mut impl Rng,
) -> Result<GpHyperparams> {
    if data.len() < 2 {
        return Err(Error::Fit(format!(
            "at least 2 training points are required, got {}",
            data.len()
        )));
    }
    options.bounds.validate()?;
    let lims = options.bounds.log_box();
    let design = ScrambledHalton::new(3, rng);
    let mut starts: Vec<[f64; 3]> = (0..options.restarts)
        .map(|i| {
            let p = design.point(i as u64);
            std::array::from_fn(|k| lims[k][0] + p[k] * (lims[k][1] - lims[k][0]))
        })
        .collect();
    if let Some(hp) = warm_start {
        starts.push(options.bounds.clamp(hp).to_log());
    }
    let problem = Lml::new(data);
    let results: Vec<Option<(f64, [f64; 3])>> = starts
        .par_iter()
        .map(|s| ascend(&problem, *s, &lims, options.max_iterations))
        .collect();
    results
        .into_iter()
        .flatten()
        .fold(None, |best: Option<(f64, [f64; 3])>, cand| match best {
            Some(b) if b.0 >= cand.0 => Some(b),
            _ => Some(cand),
        })
        .map(|(_, u)| GpHyperparams::from_log(&u))
        .ok_or_else(|| Error::Fit("every likelihood restart failed to factorize".into()))
}

/// A GP conditioned on a training set.
#[derive(Debug, Clone)]
pub struct GpPosterior {
    data: TrainingSet,
    hp: GpHyperparams,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    jitter: f64,
}

impl GpPosterior {
    pub fn new(data: TrainingSet, hp: GpHyperparams) -> Result<Self> {
        let (chol, jitter) = factorize(&data.distances(), &hp)?;
        let alpha = chol.solve(&data.standardized);
        Ok(Self {
            data,
            hp,
            chol,
            alpha,
            jitter,
        })
    }

    pub fn data(&self) -> &TrainingSet {
        &self.data
    }

    pub fn hyperparams(&self) -> &GpHyperparams {
        &self.hp
    }

    /// Diagonal jitter that was needed to factorize `K`.
    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    /// Posterior mean and latent variance `(μ′, k′)` in standardized units.
    pub fn predict(&self, x: &[f64]) -> Result<(f64, f64)> {
        if x.len() != self.data.dim() {
            return Err(Error::LengthMismatch {
                expected: self.data.dim(),
                found: x.len(),
            });
        }
        let kappa = DVector::from_iterator(
            self.data.len(),
            self.data.inputs.iter().map(|xi| matern32_r(euclidean(x, xi), &self.hp)),
        );
        let mean = kappa.dot(&self.alpha);
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&kappa)
            .expect("Cholesky factor has a positive diagonal");
        let var = (self.hp.signal_variance - v.norm_squared()).max(0.0);
        Ok((mean, var))
    }

    /// Posterior mean and variance in the units of the raw objective.
    pub fn predict_raw(&self, x: &[f64]) -> Result<(f64, f64)> {
        let (m, v) = self.predict(x)?;
        let (_, scale) = self.data.standardization();
        Ok((self.data.from_standard(m), v * scale * scale))
    }
}
