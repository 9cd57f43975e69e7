//! Shot-level simulation of one pulse schedule under the configured noise.

use std::collections::BTreeMap;

use crate::bitstring::Bitstring;
use crate::distribution::{BitstringDistribution, ProbabilityDistribution};
use crate::dynamics::{
    build_interactions, sample_state, BasisSampler, DriveParams, DriveRealization, InteractionMatrix, QaoaPropagators,
    QuantumState, Segment,
};
use crate::error::Result;
use crate::graph::Register;
use crate::noise::{
    apply_detection_errors, apply_state_prep_error, sample_drive_realization, Channel, DetectionModel,
    DopplerResampling, NoiseConfig,
};
use crate::rng::{Purpose, SeedSplitter};

/// Simulates measurement shots on one register.
///
/// Without dynamical noise the state is evolved once and sampled. Otherwise
/// every shot draws its own frozen atoms and drive realization, evolves the
/// remaining atoms and is measured once. Readout errors are applied last.
#[derive(Debug, Clone)]
pub struct ShotSimulator {
    n: usize,
    drive: DriveParams,
    interactions: InteractionMatrix,
    ideal: QaoaPropagators,
    noise: NoiseConfig,
    detection: Option<DetectionModel>,
}

impl ShotSimulator {
    pub fn new(register: &Register, drive: &DriveParams, noise: &NoiseConfig) -> Result<Self> {
        noise.validate()?;
        let interactions = build_interactions(register, drive)?;
        Ok(Self {
            n: register.len(),
            drive: *drive,
            ideal: QaoaPropagators::new(&interactions, drive)?,
            interactions,
            noise: noise.clone(),
            detection: noise.detection_model(register.len())?,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn detection_model(&self) -> Option<&DetectionModel> {
        self.detection.as_ref()
    }

    /// Noiseless final state.
    pub fn exact_state(&self, segments: &[Segment]) -> QuantumState {
        self.ideal.run(segments)
    }

    /// Noiseless Born probabilities.
    pub fn exact_probabilities(&self, segments: &[Segment]) -> Result<ProbabilityDistribution> {
        ProbabilityDistribution::from_dense(&self.exact_state(segments).probabilities(), self.n)
    }

    /// `n_shots` noisy measurements. Streams are keyed by `batch`, so each
    /// batch is reproducible on its own.
    pub fn sample(
        &self,
        segments: &[Segment],
        n_shots: u64,
        seeds: &SeedSplitter,
        batch: u64,
    ) -> Result<BitstringDistribution> {
        let clean = if self.noise.affects_dynamics() {
            self.sample_noisy_dynamics(segments, n_shots, seeds, batch)?
        } else {
            sample_state(&self.exact_state(segments), n_shots, &mut seeds.stream(Purpose::Shots, batch))?
        };
        match &self.detection {
            Some(model) => apply_detection_errors(&clean, model, &mut seeds.stream(Purpose::Detection, batch)),
            None => Ok(clean),
        }
    }

    fn sample_noisy_dynamics(
        &self,
        segments: &[Segment],
        n_shots: u64,
        seeds: &SeedSplitter,
        batch: u64,
    ) -> Result<BitstringDistribution> {
        let mut shot_rng = seeds.stream(Purpose::Shots, batch);
        let mut drive_rng = seeds.stream(Purpose::DriveNoise, batch);
        let mut prep_rng = seeds.stream(Purpose::StatePrep, batch);
        let batch_realization = match self.noise.doppler_resampling {
            DopplerResampling::PerBatch => Some(sample_drive_realization(&self.drive, self.n, &self.noise, &mut drive_rng)?),
            DopplerResampling::PerShot => None,
        };
        let prep_enabled = self.noise.enabled(Channel::StatePrep);
        let drive_varies = (self.noise.enabled(Channel::Doppler) && self.noise.temperature_uk > 0.0)
            || (self.noise.enabled(Channel::Amplitude) && self.noise.sigma_omega_rel > 0.0);
        // With one realization for the whole batch the final state depends only on the active atoms.
        let reuse_states = batch_realization.is_some() || !drive_varies;
        let mut samplers: BTreeMap<Vec<usize>, BasisSampler> = BTreeMap::new();
        let mut out = BitstringDistribution::empty(self.n);
        for _ in 0..n_shots {
            let frozen = if prep_enabled {
                apply_state_prep_error(self.n, self.noise.eta, &mut prep_rng)?
            } else {
                vec![false; self.n]
            };
            let realization = match &batch_realization {
                Some(r) => r.clone(),
                None => sample_drive_realization(&self.drive, self.n, &self.noise, &mut drive_rng)?,
            };
            let active: Vec<usize> = (0..self.n).filter(|&i| !frozen[i]).collect();
            let shot = if active.is_empty() {
                Bitstring::zeros(self.n)
            } else if let Some(sampler) = samplers.get(&active) {
                sampler.sample(&mut shot_rng).embed(&active, self.n)
            } else {
                let local = DriveRealization {
                    omega: realization.omega,
                    detuning_shifts: active.iter().map(|&i| realization.detuning_shifts[i]).collect(),
                };
                let props =
                    QaoaPropagators::with_realization(&self.interactions.subset(&active), &self.drive, &local)?;
                let sampler = BasisSampler::new(&props.run(segments));
                let shot = sampler.sample(&mut shot_rng).embed(&active, self.n);
                if reuse_states {
                    samplers.insert(active, sampler);
                }
                shot
            };
            out.record(shot, 1)?;
        }
        Ok(out)
    }
}
