//! Rydberg Ising dynamics for layered analog QAOA.
//!
//! Units: angular frequencies in rad/μs, times in μs, lengths in μm.
//! Basis-state index bit `i` is qubit `i` (little-endian), matching
//! [`Bitstring::from_index`].
//!
//! Every Hamiltonian in the protocol is piecewise constant, so evolution is
//! exact: a real-symmetric eigendecomposition for registers up to
//! [`SPECTRAL_MAX_QUBITS`], and a matrix-free scaled Taylor series (converged
//! to machine precision) above that.

use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bitstring::Bitstring;
use crate::distribution::BitstringDistribution;
use crate::error::{Error, Result};
use crate::graph::Register;

pub const TWO_PI: f64 = 2.0 * PI;

/// `C6/ħ` of the |60S_{1/2}⟩ Rydberg state of ⁸⁷Rb, 2π × 137 GHz·μm⁶, in rad/μs·μm⁶.
pub const C6_RB87_60S: f64 = TWO_PI * 137_000.0;

/// Upper bound on the Rabi frequency, 2π × 5 MHz.
pub const OMEGA_MAX: f64 = TWO_PI * 5.0;

/// Default cap on the simulated register size.
pub const MAX_SIMULATED_QUBITS: usize = 16;

/// Registers up to this size are propagated by dense eigendecomposition.
pub const SPECTRAL_MAX_QUBITS: usize = 8;

const HERMITIAN_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriveParams {
    /// Rabi frequency Ω, rad/μs.
    pub omega: f64,
    /// Detuning δ during cost segments, rad/μs.
    pub delta: f64,
    /// Interaction constant C6/ħ, rad/μs·μm⁶.
    pub c6_over_hbar: f64,
}

impl DriveParams {
    pub fn new(omega: f64, delta: f64, c6_over_hbar: f64) -> Result<Self> {
        let drive = Self {
            omega,
            delta,
            c6_over_hbar,
        };
        drive.validate()?;
        Ok(drive)
    }

    /// Ω/2π and δ/2π in MHz; C6 of the default Rydberg level.
    pub fn from_mhz(omega_mhz: f64, delta_mhz: f64) -> Result<Self> {
        Self::new(TWO_PI * omega_mhz, TWO_PI * delta_mhz, C6_RB87_60S)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || self.omega > OMEGA_MAX * (1.0 + 1e-12) {
            return Err(Error::Constraint(format!(
                "Rabi frequency must lie in (0, 2π×5 MHz], got {} rad/μs",
                self.omega
            )));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::Constraint(format!(
                "the MIS encoding needs a positive detuning, got {} rad/μs",
                self.delta
            )));
        }
        if !(self.c6_over_hbar > 0.0) || !self.c6_over_hbar.is_finite() {
            return Err(Error::Domain(format!(
                "C6/ħ must be positive, got {}",
                self.c6_over_hbar
            )));
        }
        Ok(())
    }

    /// Duration of the initial π/2 mixing pulse, `(π/2)/Ω`.
    pub fn initial_pulse_us(&self) -> f64 {
        FRAC_PI_2 / self.omega
    }
}

/// Pairwise van der Waals couplings `U_ij = C6/ħ / r_ij⁶`, rad/μs.
#[derive(Debug, Clone, PartialEq)]
pub struct InteractionMatrix {
    n: usize,
    u: Vec<f64>,
}

impl InteractionMatrix {
    /// From an explicit symmetric coupling matrix; the diagonal must be zero.
    pub fn from_matrix(n: usize, u: Vec<f64>) -> Result<Self> {
        if u.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                found: u.len(),
            });
        }
        for i in 0..n {
            if u[i * n + i] != 0.0 {
                return Err(Error::Domain(format!("non-zero self interaction on atom {i}")));
            }
            for j in 0..i {
                if u[i * n + j] != u[j * n + i] || !u[i * n + j].is_finite() {
                    return Err(Error::Domain(format!(
                        "interaction matrix is not symmetric and finite at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { n, u })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.u[i * self.n + j]
    }

    /// Restriction to the listed atoms.
    pub fn subset(&self, sites: &[usize]) -> InteractionMatrix {
        let m = sites.len();
        let mut u = vec![0.0; m * m];
        for (a, &i) in sites.iter().enumerate() {
            for (b, &j) in sites.iter().enumerate() {
                u[a * m + b] = self.get(i, j);
            }
        }
        InteractionMatrix { n: m, u }
    }

    /// Interaction energy `Σ_{i<j} U_ij z_i z_j` of a basis state.
    pub fn energy(&self, index: usize) -> f64 {
        let mut e = 0.0;
        let mut rest = index;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let mut higher = rest;
            while higher != 0 {
                let j = higher.trailing_zeros() as usize;
                higher &= higher - 1;
                e += self.u[i * self.n + j];
            }
        }
        e
    }
}

pub fn build_interactions(register: &Register, drive: &DriveParams) -> Result<InteractionMatrix> {
    let n = register.len();
    let mut u = vec![0.0; n * n];
    for i in 0..n {
        for j in i + 1..n {
            let r = register.distance(i, j);
            if r == 0.0 {
                return Err(Error::SingularInteraction(i, j));
            }
            let v = drive.c6_over_hbar / r.powi(6);
            u[i * n + j] = v;
            u[j * n + i] = v;
        }
    }
    Ok(InteractionMatrix { n, u })
}

/// `H/ħ = (Ω/2) Σ σˣ_i − Σ δ_i n̂_i + Σ_{i<j} U_ij n̂_i n̂_j`.
///
/// Stored as the transverse amplitude `Ω/2` and the diagonal in the
/// computational basis; this covers both protocol Hamiltonians.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingHamiltonian {
    n: usize,
    half_omega: f64,
    diagonal: Vec<f64>,
}

impl IsingHamiltonian {
    /// General form with per-qubit detunings.
    pub fn new(u: &InteractionMatrix, omega: f64, detunings: &[f64]) -> Result<Self> {
        let n = u.n();
        if n > MAX_SIMULATED_QUBITS {
            return Err(Error::TooLarge {
                what: "simulated register",
                size: n,
                max: MAX_SIMULATED_QUBITS,
            });
        }
        if detunings.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                found: detunings.len(),
            });
        }
        let dim = 1usize << n;
        let diagonal = (0..dim)
            .map(|index| {
                let mut e = u.energy(index);
                let mut rest = index;
                while rest != 0 {
                    e -= detunings[rest.trailing_zeros() as usize];
                    rest &= rest - 1;
                }
                e
            })
            .collect();
        Ok(Self {
            n,
            half_omega: omega / 2.0,
            diagonal,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.diagonal.len()
    }

    pub fn half_omega(&self) -> f64 {
        self.half_omega
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diagonal
    }

    pub fn is_diagonal(&self) -> bool {
        self.half_omega == 0.0
    }

    /// `out = H x`.
    pub fn apply(&self, x: &[Complex64], out: &mut [Complex64]) {
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = x[i] * self.diagonal[i];
            if self.half_omega != 0.0 {
                let mut flips = Complex64::new(0.0, 0.0);
                for q in 0..self.n {
                    flips += x[i ^ (1 << q)];
                }
                acc += flips * self.half_omega;
            }
            *o = acc;
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let dim = self.dim();
        let mut m = DMatrix::from_diagonal(&DVector::from_column_slice(&self.diagonal));
        if self.half_omega != 0.0 {
            for i in 0..dim {
                for q in 0..self.n {
                    m[(i ^ (1 << q), i)] = self.half_omega;
                }
            }
        }
        m
    }
}

/// Mixing Hamiltonian: resonant drive with the interactions left on.
pub fn hamiltonian_mixing(u: &InteractionMatrix, omega: f64) -> Result<IsingHamiltonian> {
    IsingHamiltonian::new(u, omega, &vec![0.0; u.n()])
}

/// Cost Hamiltonian: free evolution under detuning δ, diagonal in the computational basis.
pub fn hamiltonian_cost(u: &InteractionMatrix, delta: f64) -> Result<IsingHamiltonian> {
    IsingHamiltonian::new(u, 0.0, &vec![delta; u.n()])
}

/// Dense Hermitian operator, for arbitrary (test or user supplied) Hamiltonians.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianMatrix(DMatrix<Complex64>);

impl HermitianMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Domain(format!(
                "operator must be square, got {}×{}",
                m.nrows(),
                m.ncols()
            )));
        }
        let scale = m.iter().map(|z| z.norm()).fold(1.0, f64::max);
        let mut worst = 0.0f64;
        for i in 0..m.nrows() {
            for j in 0..=i {
                worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
            }
        }
        if worst > HERMITIAN_TOLERANCE * scale {
            return Err(Error::NonHermitian(worst));
        }
        Ok(Self(m))
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }
}

/// Anything that can be turned into an exact time-evolution operator.
pub trait Hamiltonian {
    fn dim(&self) -> usize;
    fn propagator(&self) -> Result<Propagator>;
}

impl Hamiltonian for IsingHamiltonian {
    fn dim(&self) -> usize {
        self.dim()
    }

    fn propagator(&self) -> Result<Propagator> {
        if self.is_diagonal() {
            return Ok(Propagator::Diagonal(self.diagonal.clone()));
        }
        if self.n <= SPECTRAL_MAX_QUBITS {
            let eig = self.to_dense().symmetric_eigen();
            return Ok(Propagator::RealSpectral {
                eigenvalues: eig.eigenvalues.iter().copied().collect(),
                vectors: eig.eigenvectors,
            });
        }
        Ok(Propagator::Taylor(self.clone()))
    }
}

impl Hamiltonian for HermitianMatrix {
    fn dim(&self) -> usize {
        self.0.nrows()
    }

    fn propagator(&self) -> Result<Propagator> {
        let eig = self.0.clone().symmetric_eigen();
        Ok(Propagator::ComplexSpectral {
            eigenvalues: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }
}

/// Precomputed `t ↦ exp(−iHt)` for one constant Hamiltonian.
#[derive(Debug, Clone)]
pub enum Propagator {
    Diagonal(Vec<f64>),
    RealSpectral {
        eigenvalues: Vec<f64>,
        vectors: DMatrix<f64>,
    },
    ComplexSpectral {
        eigenvalues: Vec<f64>,
        vectors: DMatrix<Complex64>,
    },
    Taylor(IsingHamiltonian),
}

impl Propagator {
    pub fn dim(&self) -> usize {
        match self {
            Propagator::Diagonal(d) => d.len(),
            Propagator::RealSpectral { eigenvalues, .. } => eigenvalues.len(),
            Propagator::ComplexSpectral { eigenvalues, .. } => eigenvalues.len(),
            Propagator::Taylor(h) => h.dim(),
        }
    }

    /// Applies `exp(−iHt)` in place.
    pub fn apply(&self, psi: &mut [Complex64], t: f64) {
        debug_assert_eq!(psi.len(), self.dim());
        if t == 0.0 {
            return;
        }
        match self {
            Propagator::Diagonal(d) => {
                for (a, &e) in psi.iter_mut().zip(d) {
                    *a *= Complex64::from_polar(1.0, -e * t);
                }
            }
            Propagator::RealSpectral {
                eigenvalues,
                vectors,
            } => {
                let re = DVector::from_iterator(psi.len(), psi.iter().map(|z| z.re));
                let im = DVector::from_iterator(psi.len(), psi.iter().map(|z| z.im));
                let c_re = vectors.tr_mul(&re);
                let c_im = vectors.tr_mul(&im);
                let mut r_re = DVector::zeros(psi.len());
                let mut r_im = DVector::zeros(psi.len());
                for k in 0..psi.len() {
                    let c = Complex64::new(c_re[k], c_im[k])
                        * Complex64::from_polar(1.0, -eigenvalues[k] * t);
                    r_re[k] = c.re;
                    r_im[k] = c.im;
                }
                let out_re = vectors * r_re;
                let out_im = vectors * r_im;
                for (k, a) in psi.iter_mut().enumerate() {
                    *a = Complex64::new(out_re[k], out_im[k]);
                }
            }
            Propagator::ComplexSpectral {
                eigenvalues,
                vectors,
            } => {
                let v = DVector::from_column_slice(psi);
                let mut c = vectors.ad_mul(&v);
                for (k, ck) in c.iter_mut().enumerate() {
                    *ck *= Complex64::from_polar(1.0, -eigenvalues[k] * t);
                }
                let out = vectors * c;
                psi.copy_from_slice(out.as_slice());
            }
            Propagator::Taylor(h) => taylor_propagate(h, psi, t),
        }
    }
}

/// Scaled Taylor series with a spectral shift; each substep has `‖H'‖·dt ≤ 1/2`
/// and the series runs until the next term drops below machine precision.
fn taylor_propagate(h: &IsingHamiltonian, psi: &mut [Complex64], t: f64) {
    let (lo, hi) = h
        .diagonal
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    let shift = 0.5 * (lo + hi);
    let bound = 0.5 * (hi - lo) + h.half_omega.abs() * h.n as f64;
    let steps = ((bound * t.abs()) / 0.5).ceil().max(1.0) as usize;
    let dt = t / steps as f64;
    let dim = psi.len();
    let mut term = vec![Complex64::new(0.0, 0.0); dim];
    let mut next = vec![Complex64::new(0.0, 0.0); dim];
    let minus_i_dt = Complex64::new(0.0, -dt);
    for _ in 0..steps {
        term.copy_from_slice(psi);
        for k in 1..=60 {
            h.apply(&term, &mut next);
            let factor = minus_i_dt / k as f64;
            let mut norm_sq = 0.0;
            for (x, &tk) in next.iter_mut().zip(term.iter()) {
                *x = (*x - tk * shift) * factor;
                norm_sq += x.norm_sqr();
            }
            for (a, &x) in psi.iter_mut().zip(next.iter()) {
                *a += x;
            }
            std::mem::swap(&mut term, &mut next);
            if norm_sq.sqrt() < 1e-17 {
                break;
            }
        }
    }
    let phase = Complex64::from_polar(1.0, -shift * t);
    for a in psi.iter_mut() {
        *a *= phase;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    n_qubits: usize,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    /// `|0⟩^⊗N`, all atoms in the ground state.
    pub fn ground(n_qubits: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
        amplitudes[0] = Complex64::new(1.0, 0.0);
        Self {
            n_qubits,
            amplitudes,
        }
    }

    /// `|+⟩^⊗N`; the ideal QAOA start, for comparison with the pulsed preparation.
    pub fn plus(n_qubits: usize) -> Self {
        let dim = 1usize << n_qubits;
        let a = Complex64::new((dim as f64).sqrt().recip(), 0.0);
        Self {
            n_qubits,
            amplitudes: vec![a; dim],
        }
    }

    pub fn from_amplitudes(amplitudes: Vec<Complex64>) -> Result<Self> {
        let dim = amplitudes.len();
        if dim == 0 || !dim.is_power_of_two() {
            return Err(Error::Domain(format!(
                "state dimension {dim} is not a power of two"
            )));
        }
        let state = Self {
            n_qubits: dim.trailing_zeros() as usize,
            amplitudes,
        };
        let norm = state.norm();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::Domain(format!("state norm {norm} differs from 1")));
        }
        Ok(state)
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Euclidean distance between amplitude vectors.
    pub fn distance(&self, other: &QuantumState) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

/// Applies `exp(−iHt)` to `state`.
pub fn evolve(state: &QuantumState, h: &impl Hamiltonian, t: f64) -> Result<QuantumState> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain(format!("evolution time must be ≥ 0, got {t}")));
    }
    if h.dim() != state.amplitudes.len() {
        return Err(Error::LengthMismatch {
            expected: state.amplitudes.len(),
            found: h.dim(),
        });
    }
    let mut out = state.clone();
    h.propagator()?.apply(&mut out.amplitudes, t);
    Ok(out)
}

/// Hardware bounds on pulse sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SequenceLimits {
    pub min_pulse_us: f64,
    pub max_pulse_us: f64,
    pub max_total_us: f64,
    pub max_depth: usize,
}

impl Default for SequenceLimits {
    fn default() -> Self {
        Self {
            min_pulse_us: 0.1,
            max_pulse_us: 1.0,
            max_total_us: 4.0,
            max_depth: 5,
        }
    }
}

const BOUND_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Layer {
    /// Free evolution under the detuning, t_δ.
    pub cost_us: f64,
    /// Resonant drive, t_Ω.
    pub mixing_us: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentKind {
    Mixing,
    Cost,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub kind: SegmentKind,
    pub duration_us: f64,
}

/// Validated analog-QAOA schedule: an initial π/2 mixing pulse followed by
/// `p` layers of (cost, mixing) segments.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    layers: Vec<Layer>,
    initial_mixing_us: f64,
}

impl PulseSequence {
    pub fn new(layers: Vec<Layer>, drive: &DriveParams, limits: &SequenceLimits) -> Result<Self> {
        let seq = Self {
            layers,
            initial_mixing_us: drive.initial_pulse_us(),
        };
        let violations = seq.violations(limits);
        if violations.is_empty() {
            Ok(seq)
        } else {
            Err(Error::InvalidSequence(violations))
        }
    }

    /// From the flat parameter vector `[t_δ¹, t_Ω¹, t_δ², t_Ω², …]` in μs.
    pub fn from_params(params: &[f64], drive: &DriveParams, limits: &SequenceLimits) -> Result<Self> {
        if params.len() % 2 != 0 {
            return Err(Error::InvalidSequence(vec![format!(
                "parameter vector has odd length {}",
                params.len()
            )]));
        }
        let layers = params
            .chunks_exact(2)
            .map(|c| Layer {
                cost_us: c[0],
                mixing_us: c[1],
            })
            .collect();
        Self::new(layers, drive, limits)
    }

    fn violations(&self, limits: &SequenceLimits) -> Vec<String> {
        let mut out = Vec::new();
        if self.depth() > limits.max_depth {
            out.push(format!(
                "depth {} exceeds the maximum of {}",
                self.depth(),
                limits.max_depth
            ));
        }
        for (k, layer) in self.layers.iter().enumerate() {
            for (name, t) in [("t_delta", layer.cost_us), ("t_omega", layer.mixing_us)] {
                if !t.is_finite()
                    || t < limits.min_pulse_us - BOUND_SLACK
                    || t > limits.max_pulse_us + BOUND_SLACK
                {
                    out.push(format!(
                        "layer {} {name} = {t} μs outside [{}, {}] μs",
                        k + 1,
                        limits.min_pulse_us,
                        limits.max_pulse_us
                    ));
                }
            }
        }
        let total = self.total_duration_us();
        if total > limits.max_total_us + BOUND_SLACK {
            out.push(format!(
                "total duration {total:.4} μs exceeds {} μs",
                limits.max_total_us
            ));
        }
        out
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn initial_mixing_us(&self) -> f64 {
        self.initial_mixing_us
    }

    pub fn params(&self) -> Vec<f64> {
        self.layers
            .iter()
            .flat_map(|l| [l.cost_us, l.mixing_us])
            .collect()
    }

    pub fn total_duration_us(&self) -> f64 {
        self.initial_mixing_us
            + self
                .layers
                .iter()
                .map(|l| l.cost_us + l.mixing_us)
                .sum::<f64>()
    }

    pub fn segments(&self) -> Vec<Segment> {
        let mut out = vec![Segment {
            kind: SegmentKind::Mixing,
            duration_us: self.initial_mixing_us,
        }];
        for l in &self.layers {
            out.push(Segment {
                kind: SegmentKind::Cost,
                duration_us: l.cost_us,
            });
            out.push(Segment {
                kind: SegmentKind::Mixing,
                duration_us: l.mixing_us,
            });
        }
        out
    }

    /// The schedule cut at time `t` (μs from the start of the initial pulse);
    /// the segment running at `t` is shortened.
    pub fn truncated(&self, t: f64) -> Result<Vec<Segment>> {
        let total = self.total_duration_us();
        if !(t >= 0.0) || t > total + BOUND_SLACK {
            return Err(Error::Domain(format!(
                "probe time {t} μs lies outside [0, {total}] μs"
            )));
        }
        let mut out = Vec::new();
        let mut remaining = t;
        for seg in self.segments() {
            if remaining <= 0.0 {
                break;
            }
            let d = seg.duration_us.min(remaining);
            out.push(Segment {
                kind: seg.kind,
                duration_us: d,
            });
            remaining -= d;
        }
        Ok(out)
    }
}

/// Drive seen by one shot: a global Rabi frequency and per-qubit detuning offsets.
#[derive(Debug, Clone, PartialEq)]
pub struct DriveRealization {
    pub omega: f64,
    pub detuning_shifts: Vec<f64>,
}

impl DriveRealization {
    pub fn ideal(drive: &DriveParams, n: usize) -> Self {
        Self {
            omega: drive.omega,
            detuning_shifts: vec![0.0; n],
        }
    }
}

/// Propagators for the two protocol Hamiltonians of one register and drive.
#[derive(Debug, Clone)]
pub struct QaoaPropagators {
    n_qubits: usize,
    mixing: Propagator,
    cost: Propagator,
}

impl QaoaPropagators {
    pub fn new(u: &InteractionMatrix, drive: &DriveParams) -> Result<Self> {
        Self::with_realization(u, drive, &DriveRealization::ideal(drive, u.n()))
    }

    /// Detuning offsets act during every segment: the mixing Hamiltonian sees
    /// `−Σ s_i n̂_i` and the cost Hamiltonian `−Σ (δ + s_i) n̂_i`.
    pub fn with_realization(
        u: &InteractionMatrix,
        drive: &DriveParams,
        realization: &DriveRealization,
    ) -> Result<Self> {
        let shifts = &realization.detuning_shifts;
        let mixing = IsingHamiltonian::new(u, realization.omega, shifts)?;
        let cost_detunings: Vec<f64> = shifts.iter().map(|s| drive.delta + s).collect();
        let cost = IsingHamiltonian::new(u, 0.0, &cost_detunings)?;
        Ok(Self {
            n_qubits: u.n(),
            mixing: mixing.propagator()?,
            cost: cost.propagator()?,
        })
    }

    pub fn run(&self, segments: &[Segment]) -> QuantumState {
        let mut state = QuantumState::ground(self.n_qubits);
        self.run_from(&mut state, segments);
        state
    }

    pub fn run_from(&self, state: &mut QuantumState, segments: &[Segment]) {
        for seg in segments {
            let prop = match seg.kind {
                SegmentKind::Mixing => &self.mixing,
                SegmentKind::Cost => &self.cost,
            };
            prop.apply(&mut state.amplitudes, seg.duration_us);
        }
    }
}

/// Final state of the layered protocol started from `|0⟩^⊗N`.
pub fn run_qaoa_sequence(
    seq: &PulseSequence,
    register: &Register,
    drive: &DriveParams,
) -> Result<QuantumState> {
    drive.validate()?;
    let u = build_interactions(register, drive)?;
    if (seq.initial_mixing_us - drive.initial_pulse_us()).abs() > 1e-12 {
        return Err(Error::InvalidSequence(vec![format!(
            "initial pulse of {} μs does not match (π/2)/Ω = {} μs for this drive",
            seq.initial_mixing_us,
            drive.initial_pulse_us()
        )]));
    }
    Ok(QaoaPropagators::new(&u, drive)?.run(&seq.segments()))
}

/// Inverse-CDF sampler over basis states.
#[derive(Debug, Clone)]
pub struct BasisSampler {
    n_qubits: usize,
    cumulative: Vec<f64>,
}

impl BasisSampler {
    pub fn new(state: &QuantumState) -> Self {
        let mut acc = 0.0;
        let cumulative = state
            .amplitudes
            .iter()
            .map(|a| {
                acc += a.norm_sqr();
                acc
            })
            .collect();
        Self {
            n_qubits: state.n_qubits,
            cumulative,
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> Bitstring {
        let total = *self.cumulative.last().expect("non-empty state");
        let u = rng.random::<f64>() * total;
        let idx = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1);
        Bitstring::from_index(idx as u128, self.n_qubits)
    }
}

/// `n_shots` independent computational-basis measurements.
pub fn sample_state(
    state: &QuantumState,
    n_shots: u64,
    rng: &mut impl Rng,
) -> Result<BitstringDistribution> {
    if n_shots == 0 {
        return Err(Error::Domain("at least one shot is required".into()));
    }
    let sampler = BasisSampler::new(state);
    BitstringDistribution::from_shots(state.n_qubits, (0..n_shots).map(|_| sampler.sample(rng)))
}
