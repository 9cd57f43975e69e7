//! Hardware noise: state-preparation errors, Doppler detuning shifts and
//! Rabi-amplitude jitter on the dynamics side, and uncorrelated readout bit
//! flips on the measurement side.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::distribution::{BitstringDistribution, ProbabilityDistribution};
use crate::dynamics::{DriveParams, DriveRealization};
use crate::error::{Error, Result};

/// Norm of the effective two-photon wave vector, 2π × 1.38 μm⁻¹.
pub const WAVE_VECTOR_PER_UM: f64 = 2.0 * PI * 1.38;

pub const BOLTZMANN_J_PER_K: f64 = 1.380_649e-23;

/// ⁸⁷Rb atomic mass in kg (86.909180527 u).
pub const RB87_MASS_KG: f64 = 86.909_180_527 * 1.660_539_066_60e-27;

/// Largest register the dense transfer map accepts.
pub const MAX_EXACT_TRANSFER_QUBITS: usize = 20;

/// Doppler detuning spread `σ_δ(T) = ‖k‖ √(k_B T / m)` in rad/μs, for `T` in μK.
pub fn doppler_sigma(temperature_uk: f64) -> Result<f64> {
    if !(temperature_uk >= 0.0) || !temperature_uk.is_finite() {
        return Err(Error::Domain(format!(
            "temperature must be non-negative, got {temperature_uk} μK"
        )));
    }
    // thermal velocity in m/s is numerically μm/μs
    let velocity = (BOLTZMANN_J_PER_K * temperature_uk * 1e-6 / RB87_MASS_KG).sqrt();
    Ok(WAVE_VECTOR_PER_UM * velocity)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Channel {
    StatePrep,
    Doppler,
    Amplitude,
    Detection,
}

/// When Doppler offsets are redrawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DopplerResampling {
    #[default]
    PerShot,
    PerBatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// False-positive probability p(0 → 1).
    #[serde(default = "defaults::epsilon")]
    pub epsilon: f64,
    /// False-negative probability p(1 → 0).
    #[serde(default = "defaults::epsilon_prime")]
    pub epsilon_prime: f64,
    /// Site-resolved overrides of `epsilon` / `epsilon_prime`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_per_site: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon_prime_per_site: Option<Vec<f64>>,
    /// Per-qubit state-preparation failure probability.
    #[serde(default = "defaults::eta")]
    pub eta: f64,
    #[serde(rename = "temperature_uK", default = "defaults::temperature")]
    pub temperature_uk: f64,
    /// Relative standard deviation of the Rabi frequency between shots.
    #[serde(default = "defaults::sigma_omega_rel")]
    pub sigma_omega_rel: f64,
    #[serde(default = "defaults::channels")]
    pub channels: Vec<Channel>,
    #[serde(default)]
    pub doppler_resampling: DopplerResampling,
}

mod defaults {
    use super::Channel;

    pub fn epsilon() -> f64 {
        0.03
    }
    pub fn epsilon_prime() -> f64 {
        0.08
    }
    pub fn eta() -> f64 {
        0.005
    }
    pub fn temperature() -> f64 {
        50.0
    }
    pub fn sigma_omega_rel() -> f64 {
        0.03
    }
    pub fn channels() -> Vec<Channel> {
        vec![
            Channel::StatePrep,
            Channel::Doppler,
            Channel::Amplitude,
            Channel::Detection,
        ]
    }
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            epsilon: defaults::epsilon(),
            epsilon_prime: defaults::epsilon_prime(),
            epsilon_per_site: None,
            epsilon_prime_per_site: None,
            eta: defaults::eta(),
            temperature_uk: defaults::temperature(),
            sigma_omega_rel: defaults::sigma_omega_rel(),
            channels: defaults::channels(),
            doppler_resampling: DopplerResampling::default(),
        }
    }
}

impl NoiseConfig {
    /// Every channel off.
    pub fn noiseless() -> Self {
        Self {
            channels: Vec::new(),
            ..Self::default()
        }
    }

    /// Readout errors only.
    pub fn detection_only(epsilon: f64, epsilon_prime: f64) -> Self {
        Self {
            epsilon,
            epsilon_prime,
            channels: vec![Channel::Detection],
            ..Self::default()
        }
    }

    pub fn enabled(&self, channel: Channel) -> bool {
        self.channels.contains(&channel)
    }

    /// True when some channel perturbs the dynamics itself (not just readout).
    pub fn affects_dynamics(&self) -> bool {
        (self.enabled(Channel::StatePrep) && self.eta > 0.0)
            || (self.enabled(Channel::Doppler) && self.temperature_uk > 0.0)
            || (self.enabled(Channel::Amplitude) && self.sigma_omega_rel > 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        let mut probs = vec![
            ("epsilon", self.epsilon),
            ("epsilon_prime", self.epsilon_prime),
            ("eta", self.eta),
        ];
        for (name, v) in [
            ("epsilon_per_site", &self.epsilon_per_site),
            ("epsilon_prime_per_site", &self.epsilon_prime_per_site),
        ] {
            if let Some(v) = v {
                probs.extend(v.iter().map(|&p| (name, p)));
            }
        }
        for (name, p) in probs {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::Config(format!("{name} = {p} is not a probability")));
            }
        }
        if !(self.temperature_uk >= 0.0) {
            return Err(Error::Config(format!(
                "temperature must be non-negative, got {} μK",
                self.temperature_uk
            )));
        }
        if !(self.sigma_omega_rel >= 0.0) {
            return Err(Error::Config(format!(
                "sigma_omega_rel must be non-negative, got {}",
                self.sigma_omega_rel
            )));
        }
        Ok(())
    }

    /// Readout model for an `n`-qubit register; `None` when detection noise is off.
    pub fn detection_model(&self, n: usize) -> Result<Option<DetectionModel>> {
        if !self.enabled(Channel::Detection) {
            return Ok(None);
        }
        let eps = match &self.epsilon_per_site {
            Some(v) => v.clone(),
            None => vec![self.epsilon; n],
        };
        let eps_prime = match &self.epsilon_prime_per_site {
            Some(v) => v.clone(),
            None => vec![self.epsilon_prime; n],
        };
        DetectionModel::new(eps, eps_prime).map(Some)
    }
}

/// Draws the drive one shot experiences. Doppler offsets are
/// `N(0, σ_δ(T)²)` per qubit; the Rabi frequency is `Ω(1 + N(0, σ_rel²))`,
/// truncated at zero.
pub fn sample_drive_realization(
    drive: &DriveParams,
    n: usize,
    cfg: &NoiseConfig,
    rng: &mut impl Rng,
) -> Result<DriveRealization> {
    let mut out = DriveRealization::ideal(drive, n);
    if cfg.enabled(Channel::Doppler) && cfg.temperature_uk > 0.0 {
        let normal = Normal::new(0.0, doppler_sigma(cfg.temperature_uk)?)
            .map_err(|e| Error::Domain(e.to_string()))?;
        for s in out.detuning_shifts.iter_mut() {
            *s = normal.sample(rng);
        }
    }
    if cfg.enabled(Channel::Amplitude) && cfg.sigma_omega_rel > 0.0 {
        let normal =
            Normal::new(0.0, cfg.sigma_omega_rel).map_err(|e| Error::Domain(e.to_string()))?;
        out.omega = drive.omega * (1.0 + normal.sample(rng)).max(0.0);
    }
    Ok(out)
}

/// Qubits whose optical pumping failed: each independently with probability `eta`.
/// Returned as a mask; frozen atoms stay in |0⟩ and do not take part in the dynamics.
pub fn apply_state_prep_error(n: usize, eta: f64, rng: &mut impl Rng) -> Result<Vec<bool>> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::Domain(format!("eta = {eta} is not a probability")));
    }
    Ok((0..n).map(|_| eta > 0.0 && rng.random::<f64>() < eta).collect())
}

/// Per-site readout transfer matrices
/// `M_i = [[1 − ε_i, ε′_i], [ε_i, 1 − ε′_i]]` (columns: true state 0, 1).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectionModel {
    epsilon: Vec<f64>,
    epsilon_prime: Vec<f64>,
}

impl DetectionModel {
    pub fn new(epsilon: Vec<f64>, epsilon_prime: Vec<f64>) -> Result<Self> {
        if epsilon.len() != epsilon_prime.len() {
            return Err(Error::LengthMismatch {
                expected: epsilon.len(),
                found: epsilon_prime.len(),
            });
        }
        if let Some(p) = epsilon
            .iter()
            .chain(&epsilon_prime)
            .find(|p| !(0.0..=1.0).contains(*p))
        {
            return Err(Error::Domain(format!("{p} is not a flip probability")));
        }
        Ok(Self {
            epsilon,
            epsilon_prime,
        })
    }

    pub fn uniform(n: usize, epsilon: f64, epsilon_prime: f64) -> Result<Self> {
        Self::new(vec![epsilon; n], vec![epsilon_prime; n])
    }

    pub fn n_qubits(&self) -> usize {
        self.epsilon.len()
    }

    pub fn epsilon(&self) -> &[f64] {
        &self.epsilon
    }

    pub fn epsilon_prime(&self) -> &[f64] {
        &self.epsilon_prime
    }

    pub fn is_identity(&self) -> bool {
        self.epsilon.iter().chain(&self.epsilon_prime).all(|&p| p == 0.0)
    }

    /// `M_i` as `[[m00, m01], [m10, m11]]`, row = measured, column = true.
    pub fn matrix(&self, i: usize) -> [[f64; 2]; 2] {
        let (e, ep) = (self.epsilon[i], self.epsilon_prime[i]);
        [[1.0 - e, ep], [e, 1.0 - ep]]
    }

    /// `M_i⁻¹`; requires `ε_i + ε′_i < 1`.
    pub fn inverse_matrix(&self, i: usize) -> Result<[[f64; 2]; 2]> {
        let (e, ep) = (self.epsilon[i], self.epsilon_prime[i]);
        let det = 1.0 - e - ep;
        if det <= 0.0 {
            return Err(Error::SingularDetectionModel(e + ep));
        }
        Ok([[(1.0 - ep) / det, -ep / det], [-e / det, (1.0 - e) / det]])
    }

    /// `Π_i M_i[measured_i, true_i]`: probability of reading `measured` from `truth`.
    pub fn transition_probability(&self, truth: &Bitstring, measured: &Bitstring) -> f64 {
        (0..self.n_qubits())
            .map(|i| self.matrix(i)[measured.get(i) as usize][truth.get(i) as usize])
            .product()
    }

    /// Weight of one `measured` outcome after the transfer map, for a sparse
    /// input distribution. Works at any register size; nothing of size 2^N is built.
    pub fn outcome_probability(&self, input: &ProbabilityDistribution, measured: &Bitstring) -> f64 {
        input
            .support()
            .iter()
            .map(|(truth, &p)| p * self.transition_probability(truth, measured))
            .sum()
    }

    /// Flips each bit of one shot: 0 → 1 with probability ε_i, 1 → 0 with ε′_i.
    pub fn corrupt(&self, shot: &Bitstring, rng: &mut impl Rng) -> Bitstring {
        let mut out = *shot;
        for i in 0..self.n_qubits() {
            let p = if shot.get(i) {
                self.epsilon_prime[i]
            } else {
                self.epsilon[i]
            };
            if p > 0.0 && rng.random::<f64>() < p {
                out = out.flipped(i);
            }
        }
        out
    }
}

/// Per-shot Monte Carlo readout corruption.
pub fn apply_detection_errors(
    dist: &BitstringDistribution,
    model: &DetectionModel,
    rng: &mut impl Rng,
) -> Result<BitstringDistribution> {
    use crate::distribution::Outcomes;
    if model.n_qubits() != dist.n_qubits() {
        return Err(Error::LengthMismatch {
            expected: dist.n_qubits(),
            found: model.n_qubits(),
        });
    }
    if model.is_identity() {
        return Ok(dist.clone());
    }
    let mut out = BitstringDistribution::empty(dist.n_qubits());
    for (shot, &count) in dist.counts() {
        for _ in 0..count {
            out.record(model.corrupt(shot, rng), 1)?;
        }
    }
    Ok(out)
}

/// Exact `P̃ = (⊗_i M_i) P` on a dense probability vector, applied one qubit
/// factor at a time.
pub fn detection_transfer_exact(probs: &[f64], model: &DetectionModel) -> Result<Vec<f64>> {
    let n = model.n_qubits();
    if n > MAX_EXACT_TRANSFER_QUBITS {
        return Err(Error::TooLarge {
            what: "dense transfer map",
            size: n,
            max: MAX_EXACT_TRANSFER_QUBITS,
        });
    }
    let factors: Vec<_> = (0..n).map(|i| model.matrix(i)).collect();
    apply_factorwise(probs, &factors)
}

/// Applies `⊗_i F_i` to a dense vector indexed by basis state.
pub(crate) fn apply_factorwise(v: &[f64], factors: &[[[f64; 2]; 2]]) -> Result<Vec<f64>> {
    let n = factors.len();
    if v.len() != 1usize << n {
        return Err(Error::LengthMismatch {
            expected: 1 << n,
            found: v.len(),
        });
    }
    let mut out = v.to_vec();
    for (q, m) in factors.iter().enumerate() {
        let bit = 1usize << q;
        for i in 0..out.len() {
            if i & bit == 0 {
                let (a, b) = (out[i], out[i | bit]);
                out[i] = m[0][0] * a + m[0][1] * b;
                out[i | bit] = m[1][0] * a + m[1][1] * b;
            }
        }
    }
    Ok(out)
}
