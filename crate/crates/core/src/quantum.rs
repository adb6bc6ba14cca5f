//! Dense state vectors and exact propagation under piecewise-constant
//! Hamiltonians.
//!
//! Everything here works in units with hbar = 1, so Hamiltonian entries are
//! angular frequencies and `exp(-i H t)` is dimensionless. All Hilbert spaces
//! in this crate are tiny (dimension <= 40) so storage is dense throughout.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Tolerance on the unit norm of a state handed to [`QuantumState::new`].
pub const NORM_TOLERANCE: f64 = 1e-9;

/// Relative elementwise tolerance for the Hermiticity check.
pub const HERMITIAN_TOLERANCE: f64 = 1e-12;

/// A normalized ket in a fixed, named basis.
#[derive(Clone, Debug, PartialEq)]
pub struct QuantumState {
    amplitudes: DVector<C64>,
    basis: &'static str,
}

impl QuantumState {
    /// Builds a state from raw amplitudes, which must already have unit norm.
    pub fn new(amplitudes: Vec<C64>, basis: &'static str) -> Result<Self> {
        let amplitudes = DVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::param(
                "amplitudes",
                format!("state norm is {norm}, expected 1"),
            ));
        }
        Ok(Self { amplitudes, basis })
    }

    /// Builds a state from raw amplitudes, rescaling them to unit norm.
    pub fn normalized(amplitudes: Vec<C64>, basis: &'static str) -> Result<Self> {
        let mut amplitudes = DVector::from_vec(amplitudes);
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::param("amplitudes", "cannot normalize a zero vector"));
        }
        amplitudes.unscale_mut(norm);
        Ok(Self { amplitudes, basis })
    }

    pub fn basis_state(dim: usize, index: usize, basis: &'static str) -> Result<Self> {
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut amplitudes = DVector::zeros(dim);
        amplitudes[index] = C64::new(1.0, 0.0);
        Ok(Self { amplitudes, basis })
    }

    pub(crate) fn from_vector_unchecked(amplitudes: DVector<C64>, basis: &'static str) -> Self {
        Self { amplitudes, basis }
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn basis(&self) -> &'static str {
        self.basis
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> C64 {
        self.amplitudes[index]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    pub fn populations(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Inner product `<self|other>`.
    pub fn inner(&self, other: &QuantumState) -> Result<C64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Multiplies every amplitude by `exp(i phase)`.
    pub fn with_global_phase(&self, phase: f64) -> Self {
        let factor = C64::from_polar(1.0, phase);
        Self {
            amplitudes: self.amplitudes.map(|a| a * factor),
            basis: self.basis,
        }
    }
}

/// Squared overlap `|<target|state>|^2`. Insensitive to global phase.
pub fn fidelity(state: &QuantumState, target: &QuantumState) -> Result<f64> {
    let overlap = target.inner(state)?;
    Ok(overlap.norm_sqr().clamp(0.0, 1.0))
}

fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// A dense Hermitian matrix in angular-frequency units.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    entries: DMatrix<C64>,
}

impl HermitianOperator {
    pub fn new(entries: DMatrix<C64>) -> Result<Self> {
        if !entries.is_square() {
            return Err(Error::DimensionMismatch {
                expected: entries.nrows(),
                found: entries.ncols(),
            });
        }
        let scale = entries.iter().map(|z| z.norm()).fold(1.0_f64, f64::max);
        let deviation = (&entries - entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0_f64, f64::max);
        let finite = entries.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !finite || deviation > HERMITIAN_TOLERANCE * scale {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self { entries })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            entries: DMatrix::zeros(dim, dim),
        }
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<C64> {
        &self.entries
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.entries[(row, col)]
    }

    /// `H |psi>` without any normalization.
    pub fn apply(&self, amplitudes: &DVector<C64>) -> DVector<C64> {
        &self.entries * amplitudes
    }
}

/// A square pulse: one Hamiltonian held for a fixed duration.
#[derive(Clone, Debug, PartialEq)]
pub struct PulseSegment {
    hamiltonian: HermitianOperator,
    duration: f64,
}

impl PulseSegment {
    pub fn new(hamiltonian: HermitianOperator, duration: f64) -> Result<Self> {
        if !(duration.is_finite() && duration >= 0.0) {
            return Err(Error::param(
                "duration",
                format!("{duration} must be finite and >= 0"),
            ));
        }
        Ok(Self {
            hamiltonian,
            duration,
        })
    }

    pub fn hamiltonian(&self) -> &HermitianOperator {
        &self.hamiltonian
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }
}

/// Spectral form `H = Q diag(lambda) Q^dagger` of one segment, reused for
/// every time sample inside it.
struct SpectralPropagator {
    eigenvalues: DVector<f64>,
    eigenvectors: DMatrix<C64>,
}

impl SpectralPropagator {
    fn new(hamiltonian: &HermitianOperator) -> Self {
        let eigen = SymmetricEigen::new(hamiltonian.entries.clone());
        Self {
            eigenvalues: eigen.eigenvalues,
            eigenvectors: eigen.eigenvectors,
        }
    }

    /// Coordinates of `psi` in the eigenbasis.
    fn project(&self, psi: &DVector<C64>) -> DVector<C64> {
        self.eigenvectors.ad_mul(psi)
    }

    fn evolve_projected(&self, coords: &DVector<C64>, t: f64) -> DVector<C64> {
        let phased = DVector::from_iterator(
            coords.len(),
            coords
                .iter()
                .zip(self.eigenvalues.iter())
                .map(|(c, &lambda)| c * C64::from_polar(1.0, -lambda * t)),
        );
        &self.eigenvectors * phased
    }
}

fn check_segments(state: &QuantumState, segments: &[PulseSegment]) -> Result<()> {
    for segment in segments {
        check_dim(state.dim(), segment.hamiltonian.dim())?;
    }
    Ok(())
}

/// Applies `U_n ... U_1 |psi>` with `U_k = exp(-i H_k t_k)`.
pub fn evolve_piecewise(state: &QuantumState, segments: &[PulseSegment]) -> Result<QuantumState> {
    check_segments(state, segments)?;
    let mut psi = state.amplitudes.clone();
    for segment in segments.iter().filter(|s| s.duration > 0.0) {
        let propagator = SpectralPropagator::new(&segment.hamiltonian);
        psi = propagator.evolve_projected(&propagator.project(&psi), segment.duration);
    }
    Ok(QuantumState::from_vector_unchecked(psi, state.basis))
}

/// Basis populations sampled along a piecewise evolution.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    /// `populations[k][i]` is `|<i|psi(times[k])>|^2`.
    pub populations: Vec<Vec<f64>>,
    pub final_state: QuantumState,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest population of basis state `index` over all samples.
    pub fn max_population(&self, index: usize) -> f64 {
        self.populations
            .iter()
            .map(|p| p[index])
            .fold(0.0, f64::max)
    }
}

/// Samples populations uniformly within each segment, endpoints included.
///
/// Segment boundaries are shared, so a protocol of `n` non-empty segments
/// yields `1 + n * (samples_per_segment - 1)` samples. Zero-length segments
/// contribute nothing.
pub fn trajectory(
    state: &QuantumState,
    segments: &[PulseSegment],
    samples_per_segment: usize,
) -> Result<Trajectory> {
    if samples_per_segment < 2 {
        return Err(Error::param(
            "samples_per_segment",
            format!("{samples_per_segment} must be >= 2"),
        ));
    }
    check_segments(state, segments)?;

    let mut psi = state.amplitudes.clone();
    let mut t0 = 0.0;
    let mut times = vec![0.0];
    let mut populations = vec![state.populations()];
    for segment in segments.iter().filter(|s| s.duration > 0.0) {
        let propagator = SpectralPropagator::new(&segment.hamiltonian);
        let coords = propagator.project(&psi);
        let steps = samples_per_segment - 1;
        for k in 1..=steps {
            let t = segment.duration * k as f64 / steps as f64;
            let sample = propagator.evolve_projected(&coords, t);
            times.push(t0 + t);
            populations.push(sample.iter().map(|a| a.norm_sqr()).collect());
            if k == steps {
                psi = sample;
            }
        }
        t0 += segment.duration;
    }
    Ok(Trajectory {
        times,
        populations,
        final_state: QuantumState::from_vector_unchecked(psi, state.basis),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn sigma_x(omega: f64) -> HermitianOperator {
        let half = c(omega / 2.0, 0.0);
        HermitianOperator::new(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), half, half, c(0.0, 0.0)],
        ))
        .unwrap()
    }

    #[test]
    fn empty_protocol_is_identity() {
        let psi = QuantumState::normalized(vec![c(1.0, 0.5), c(-0.3, 0.2)], "qubit").unwrap();
        assert_eq!(evolve_piecewise(&psi, &[]).unwrap(), psi);
        let zero = PulseSegment::new(sigma_x(3.0), 0.0).unwrap();
        assert_eq!(evolve_piecewise(&psi, &[zero]).unwrap(), psi);
    }

    #[test]
    fn rabi_pi_pulse_gives_minus_i_excited() {
        let omega = 2.0;
        let ground = QuantumState::basis_state(2, 0, "qubit").unwrap();
        let pulse = PulseSegment::new(sigma_x(omega), PI / omega).unwrap();
        let out = evolve_piecewise(&ground, &[pulse]).unwrap();
        assert!(out.amplitude(0).norm() < 1e-12);
        assert!((out.amplitude(1) - c(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn fidelity_basics() {
        let zero = QuantumState::basis_state(2, 0, "qubit").unwrap();
        let one = QuantumState::basis_state(2, 1, "qubit").unwrap();
        let psi = QuantumState::normalized(vec![c(0.6, 0.1), c(0.2, -0.7)], "qubit").unwrap();
        assert!((fidelity(&psi, &psi).unwrap() - 1.0).abs() < 1e-14);
        for phase in [0.3, 1.7, -2.9] {
            let rotated = psi.with_global_phase(phase);
            assert!((fidelity(&rotated, &psi).unwrap() - 1.0).abs() < 1e-14);
        }
        assert_eq!(fidelity(&zero, &one).unwrap(), 0.0);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = QuantumState::basis_state(2, 0, "qubit").unwrap();
        let b = QuantumState::basis_state(3, 0, "qutrit").unwrap();
        assert!(matches!(
            fidelity(&a, &b),
            Err(Error::DimensionMismatch { .. })
        ));
        let seg = PulseSegment::new(HermitianOperator::zeros(3), 1.0).unwrap();
        assert!(matches!(
            evolve_piecewise(&a, std::slice::from_ref(&seg)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(trajectory(&a, &[seg], 4).is_err());
    }

    #[test]
    fn non_hermitian_rejected() {
        let m =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.5, 0.0), c(0.0, 0.0)]);
        assert!(matches!(
            HermitianOperator::new(m),
            Err(Error::NotHermitian { .. })
        ));
        let complex_diag = DMatrix::from_row_slice(1, 1, &[c(1.0, 1e-3)]);
        assert!(HermitianOperator::new(complex_diag).is_err());
    }

    #[test]
    fn negative_duration_rejected() {
        assert!(PulseSegment::new(HermitianOperator::zeros(2), -1.0).is_err());
        assert!(PulseSegment::new(HermitianOperator::zeros(2), f64::NAN).is_err());
    }

    #[test]
    fn unnormalized_state_rejected() {
        assert!(QuantumState::new(vec![c(1.0, 0.0), c(1.0, 0.0)], "qubit").is_err());
        assert!(QuantumState::normalized(vec![c(0.0, 0.0)], "qubit").is_err());
    }

    #[test]
    fn zero_duration_trajectory_has_one_sample() {
        let psi = QuantumState::basis_state(2, 0, "qubit").unwrap();
        let seg = PulseSegment::new(sigma_x(1.0), 0.0).unwrap();
        let traj = trajectory(&psi, &[seg], 10).unwrap();
        assert_eq!(traj.times, vec![0.0]);
        assert_eq!(traj.populations, vec![vec![1.0, 0.0]]);
    }

    #[test]
    fn rabi_trajectory_follows_sin_squared() {
        let omega = 1.3;
        let psi = QuantumState::basis_state(2, 0, "qubit").unwrap();
        let seg = PulseSegment::new(sigma_x(omega), PI / omega).unwrap();
        let traj = trajectory(&psi, std::slice::from_ref(&seg), 100).unwrap();
        assert_eq!(traj.len(), 100);
        let mut previous = -1.0;
        for (t, pops) in traj.times.iter().zip(&traj.populations) {
            let expected = (omega * t / 2.0).sin().powi(2);
            assert!((pops[1] - expected).abs() < 1e-12);
            assert!(pops[1] >= previous);
            previous = pops[1];
        }
        let direct = evolve_piecewise(&psi, &[seg]).unwrap();
        assert!((traj.final_state.amplitudes() - direct.amplitudes()).norm() < 1e-9);
    }

    #[test]
    fn trajectory_rejects_single_sample() {
        let psi = QuantumState::basis_state(2, 0, "qubit").unwrap();
        assert!(trajectory(&psi, &[], 1).is_err());
    }
}
