use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kernel hyperparameters, in normalized-input and standardized-output units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpHyperparams {
    /// σ²
    pub signal_variance: f64,
    /// ℓ
    pub correlation_length: f64,
    /// σ_N², added to the kernel diagonal only. Zero gives exact interpolation.
    pub noise_variance: f64,
}

impl GpHyperparams {
    pub fn new(signal_variance: f64, correlation_length: f64, noise_variance: f64) -> Result<Self> {
        let hp = Self {
            signal_variance,
            correlation_length,
            noise_variance,
        };
        for (name, v) in [
            ("signal variance", signal_variance),
            ("correlation length", correlation_length),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::Domain(format!("{name} must be positive, got {v}")));
            }
        }
        if !(noise_variance >= 0.0) || !noise_variance.is_finite() {
            return Err(Error::Domain(format!(
                "noise variance must be non-negative, got {noise_variance}"
            )));
        }
        Ok(hp)
    }

    /// `[ln ℓ, ln σ², ln σ_N²]`, the coordinates used by the fit.
    pub fn to_log(&self) -> [f64; 3] {
        [
            self.correlation_length.ln(),
            self.signal_variance.ln(),
            self.noise_variance.ln(),
        ]
    }

    pub fn from_log(u: &[f64; 3]) -> Self {
        Self {
            correlation_length: u[0].exp(),
            signal_variance: u[1].exp(),
            noise_variance: u[2].exp(),
        }
    }
}

/// Closed intervals for each hyperparameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperparamBounds {
    pub correlation_length: [f64; 2],
    pub signal_variance: [f64; 2],
    pub noise_variance: [f64; 2],
}

impl Default for HyperparamBounds {
    fn default() -> Self {
        Self {
            correlation_length: [1e-2, 10.0],
            signal_variance: [1e-3, 10.0],
            noise_variance: [1e-6, 1.0],
        }
    }
}

impl HyperparamBounds {
    pub fn validate(&self) -> Result<()> {
        for (name, [lo, hi]) in [
            ("correlation_length", self.correlation_length),
            ("signal_variance", self.signal_variance),
            ("noise_variance", self.noise_variance),
        ] {
            if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
                return Err(Error::Config(format!(
                    "hyperparameter bounds for {name} must satisfy 0 < lo <= hi, got [{lo}, {hi}]"
                )));
            }
        }
        Ok(())
    }

    /// Bounds in the log coordinates of [`GpHyperparams::to_log`].
    pub fn log_box(&self) -> [[f64; 2]; 3] {
        [
            self.correlation_length.map(f64::ln),
            self.signal_variance.map(f64::ln),
            self.noise_variance.map(f64::ln),
        ]
    }

    pub fn clamp(&self, hp: &GpHyperparams) -> GpHyperparams {
        GpHyperparams {
            correlation_length: hp
                .correlation_length
                .clamp(self.correlation_length[0], self.correlation_length[1]),
            signal_variance: hp
                .signal_variance
                .clamp(self.signal_variance[0], self.signal_variance[1]),
            noise_variance: hp
                .noise_variance
                .clamp(self.noise_variance[0], self.noise_variance[1]),
        }
    }
}

pub(crate) fn euclidean(x1: &[f64], x2: &[f64]) -> f64 {
    x1.iter()
        .zip(x2)
        .map(|(a, b)| (a - b).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Matérn-3/2 covariance as a function of distance, without the noise term.
pub(crate) fn matern32_r(r: f64, hp: &GpHyperparams) -> f64 {
    let s = 3f64.sqrt() * r / hp.correlation_length;
    hp.signal_variance * (1.0 + s) * (-s).exp()
}

/// Matérn-3/2 kernel `σ²(1 + √3 r/ℓ) exp(−√3 r/ℓ)`, plus `σ_N²` when
/// `same_point` marks a diagonal entry.
pub fn matern32(x1: &[f64], x2: &[f64], hp: &GpHyperparams, same_point: bool) -> Result<f64> {
    if x1.len() != x2.len() {
        return Err(Error::LengthMismatch {
            expected: x1.len(),
            found: x2.len(),
        });
    }
    let k = matern32_r(euclidean(x1, x2), hp);
    Ok(if same_point { k + hp.noise_variance } else { k })
}
