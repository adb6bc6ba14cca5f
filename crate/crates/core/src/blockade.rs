//! Control-atom / ensemble entanglement through Rydberg blockade.
//!
//! The model is the four-level space spanned by the control atom
//! (`g_c`, `r_c`) and the ensemble collective states (`G_e`, `W_Ryd`), with
//! basis order `[|g_c,G_e>, |r_c,G_e>, |g_c,W>, |r_c,W>]`. A pi/2 pulse on the
//! control atom is followed by a pi pulse on the ensemble; the doubly excited
//! state `|r_c,W>` is shifted by the blockade energy `V`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::error::{check_positive, Error, Result};
use crate::quantum::{
    evolve_piecewise, fidelity, trajectory, HermitianOperator, PulseSegment, QuantumState,
    Trajectory,
};

pub const BASIS: &str = "gcGe,rcGe,gcW,rcW";
pub const GC_GE: usize = 0;
pub const RC_GE: usize = 1;
pub const GC_W: usize = 2;
pub const RC_W: usize = 3;

/// Default blockade strength in units of the collective Rabi frequency.
pub const DEFAULT_BLOCKADE_RATIO: f64 = 15.8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlockadeParams {
    n_atoms: u64,
    omega: f64,
    blockade_v: f64,
    c6: Option<f64>,
}

impl BlockadeParams {
    /// `blockade_v` may be `f64::INFINITY`, which removes `|r_c,W>` from the
    /// dynamics entirely (perfect blockade).
    pub fn new(n_atoms: u64, omega: f64, blockade_v: f64) -> Result<Self> {
        if n_atoms < 1 {
            return Err(Error::param("n_atoms", "must be >= 1"));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(Error::param(
                "omega",
                format!("{omega} must be finite and > 0"),
            ));
        }
        if blockade_v.is_nan() || blockade_v < 0.0 {
            return Err(Error::param(
                "blockade_v",
                format!("{blockade_v} must be >= 0"),
            ));
        }
        Ok(Self {
            n_atoms,
            omega,
            blockade_v,
            c6: None,
        })
    }

    /// Sets `V = ratio * sqrt(N) * omega`.
    pub fn with_blockade_ratio(n_atoms: u64, omega: f64, ratio: f64) -> Result<Self> {
        if ratio.is_nan() || ratio < 0.0 {
            return Err(Error::param(
                "blockade_ratio",
                format!("{ratio} must be >= 0"),
            ));
        }
        let (omega_eff, _) = effective_rabi(n_atoms, omega)?;
        Self::new(n_atoms, omega, ratio * omega_eff)
    }

    pub fn perfect_blockade(n_atoms: u64, omega: f64) -> Result<Self> {
        Self::new(n_atoms, omega, f64::INFINITY)
    }

    /// N = 1000, Omega/2pi = 10 MHz, V/Omega_eff = 15.8.
    pub fn operating_point() -> Self {
        Self::with_blockade_ratio(1000, 2.0 * PI * 10e6, DEFAULT_BLOCKADE_RATIO)
            .expect("operating point is valid")
    }

    pub fn with_c6(mut self, c6: f64) -> Result<Self> {
        check_positive("c6", c6)?;
        self.c6 = Some(c6);
        Ok(self)
    }

    pub fn n_atoms(&self) -> u64 {
        self.n_atoms
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn blockade_v(&self) -> f64 {
        self.blockade_v
    }

    pub fn c6(&self) -> Option<f64> {
        self.c6
    }

    pub fn effective_rabi(&self) -> f64 {
        (self.n_atoms as f64).sqrt() * self.omega
    }

    pub fn blockade_ratio(&self) -> f64 {
        self.blockade_v / self.effective_rabi()
    }

    pub fn control_pulse_duration(&self) -> f64 {
        PI / (2.0 * self.omega)
    }

    pub fn ensemble_pulse_duration(&self) -> f64 {
        PI / self.effective_rabi()
    }

    pub fn blockade_radius(&self) -> Option<Result<f64>> {
        self.c6.map(|c6| blockade_radius(c6, self.omega))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DriveStage {
    /// `H_c` only, phased so that a pi/2 pulse takes `|g>` to `(|g>+|r>)/sqrt2`.
    ControlDrive,
    /// Collective coupling `G_e <-> W` plus the blockade shift.
    EnsembleDrive,
}

pub fn build_step1_hamiltonian(params: &BlockadeParams, stage: DriveStage) -> HermitianOperator {
    let zero = C64::new(0.0, 0.0);
    let mut h = DMatrix::from_element(4, 4, zero);
    match stage {
        DriveStage::ControlDrive => {
            // (i Omega/2)(|r><g| - |g><r|), acting on both ensemble states
            let up = C64::new(0.0, params.omega / 2.0);
            for (g, r) in [(GC_GE, RC_GE), (GC_W, RC_W)] {
                h[(r, g)] = up;
                h[(g, r)] = up.conj();
            }
        }
        DriveStage::EnsembleDrive => {
            let coupling = C64::new(params.effective_rabi() / 2.0, 0.0);
            h[(GC_W, GC_GE)] = coupling;
            h[(GC_GE, GC_W)] = coupling;
            if params.blockade_v.is_finite() {
                h[(RC_W, RC_GE)] = coupling;
                h[(RC_GE, RC_W)] = coupling;
                h[(RC_W, RC_W)] = C64::new(params.blockade_v, 0.0);
            }
        }
    }
    HermitianOperator::new(h).expect("step-1 Hamiltonian is Hermitian by construction")
}

/// The two square pulses of the protocol, in order.
pub fn step1_segments(params: &BlockadeParams) -> Vec<PulseSegment> {
    vec![
        PulseSegment::new(
            build_step1_hamiltonian(params, DriveStage::ControlDrive),
            params.control_pulse_duration(),
        )
        .expect("positive duration"),
        PulseSegment::new(
            build_step1_hamiltonian(params, DriveStage::EnsembleDrive),
            params.ensemble_pulse_duration(),
        )
        .expect("positive duration"),
    ]
}

pub fn initial_state() -> QuantumState {
    QuantumState::basis_state(4, GC_GE, BASIS).expect("index in range")
}

/// `(|r_c,G_e> - i|g_c,W>)/sqrt2`.
pub fn bell_target() -> QuantumState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    QuantumState::new(
        vec![
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
            C64::new(0.0, -s),
            C64::new(0.0, 0.0),
        ],
        BASIS,
    )
    .expect("unit norm")
}

/// `(|g_c,G_e> + |r_c,G_e>)/sqrt2`.
pub fn intermediate_target() -> QuantumState {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    QuantumState::new(
        vec![
            C64::new(s, 0.0),
            C64::new(s, 0.0),
            C64::new(0.0, 0.0),
            C64::new(0.0, 0.0),
        ],
        BASIS,
    )
    .expect("unit norm")
}

#[derive(Clone, Debug, PartialEq)]
pub struct Step1Result {
    pub final_state: QuantumState,
    /// Overlap with the target Bell state; only global phase is forgiven.
    pub bell_fidelity: f64,
    /// Peak population of `|r_c,W>` over the sampled trajectory.
    pub max_leakage: f64,
    pub trajectory: Trajectory,
}

pub fn run_step1(params: &BlockadeParams, samples_per_segment: usize) -> Result<Step1Result> {
    let traj = trajectory(
        &initial_state(),
        &step1_segments(params),
        samples_per_segment,
    )?;
    let final_state = traj.final_state.clone();
    Ok(Step1Result {
        bell_fidelity: fidelity(&final_state, &bell_target())?,
        max_leakage: traj.max_population(RC_W),
        final_state,
        trajectory: traj,
    })
}

/// State after the control pi/2 pulse alone.
pub fn intermediate_state_check(params: &BlockadeParams) -> Result<QuantumState> {
    let segments = step1_segments(params);
    evolve_piecewise(&initial_state(), &segments[..1])
}

/// `(sqrt(N) * omega, pi / (sqrt(N) * omega))`.
pub fn effective_rabi(n_atoms: u64, omega: f64) -> Result<(f64, f64)> {
    if n_atoms < 1 {
        return Err(Error::param("n_atoms", "must be >= 1"));
    }
    check_positive("omega", omega)?;
    let omega_eff = (n_atoms as f64).sqrt() * omega;
    Ok((omega_eff, PI / omega_eff))
}

/// `(C6 / omega)^(1/6)` with hbar = 1. Units follow the inputs: C6 in
/// rad/s * m^6 and omega in rad/s give meters.
pub fn blockade_radius(c6: f64, omega: f64) -> Result<f64> {
    check_positive("c6", c6)?;
    check_positive("omega", omega)?;
    Ok((c6 / omega).powf(1.0 / 6.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_PI: f64 = 2.0 * PI;

    #[test]
    fn ensemble_drive_without_blockade_is_block_symmetric() {
        let p = BlockadeParams::new(50, 1.0, 0.0).unwrap();
        let h = build_step1_hamiltonian(&p, DriveStage::EnsembleDrive);
        assert_eq!(h.entry(GC_GE, GC_W), h.entry(RC_GE, RC_W));
        assert_eq!(h.entry(GC_W, GC_W), h.entry(RC_W, RC_W));
        assert_eq!(h.entry(GC_GE, GC_GE), h.entry(RC_GE, RC_GE));
    }

    #[test]
    fn blockade_shift_on_doubly_excited_state() {
        let p = BlockadeParams::new(1000, 2.0, 123.0).unwrap();
        let h = build_step1_hamiltonian(&p, DriveStage::EnsembleDrive);
        assert_eq!(h.entry(RC_W, RC_W), C64::new(123.0, 0.0));
        assert!((h.entry(GC_W, GC_GE).re - p.effective_rabi() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn control_drive_magnitude_is_half_omega() {
        let p = BlockadeParams::new(10, 3.0, 1.0).unwrap();
        let h = build_step1_hamiltonian(&p, DriveStage::ControlDrive);
        assert!((h.entry(RC_GE, GC_GE).norm() - 1.5).abs() < 1e-15);
        assert!((h.entry(RC_W, GC_W).norm() - 1.5).abs() < 1e-15);
        assert_eq!(h.entry(GC_W, GC_GE), C64::new(0.0, 0.0));
    }

    #[test]
    fn intermediate_state_matches_equal_superposition() {
        for omega in [1.0, TWO_PI * 10e6, 0.37] {
            let p = BlockadeParams::with_blockade_ratio(1000, omega, 15.8).unwrap();
            let psi = intermediate_state_check(&p).unwrap();
            let f = fidelity(&psi, &intermediate_target()).unwrap();
            assert!(f > 1.0 - 1e-9, "fidelity {f}");
            // exact phase, not just overlap
            assert!((psi.amplitudes() - intermediate_target().amplitudes()).norm() < 1e-9);
            let pops = psi.populations();
            assert!(pops[GC_W] + pops[RC_W] < 1e-20);
        }
    }

    #[test]
    fn control_pulse_duration_at_ten_mhz() {
        let p = BlockadeParams::operating_point();
        assert!((p.control_pulse_duration() - 25e-9).abs() < 1e-15);
    }

    #[test]
    fn effective_rabi_values() {
        let (eff, t_pi) = effective_rabi(1000, TWO_PI * 10e6).unwrap();
        assert!((eff / TWO_PI / 1e6 - 316.2).abs() < 0.05);
        assert!((t_pi * 1e9 - 1.58).abs() < 0.005);
        assert_eq!(effective_rabi(1, 2.5).unwrap().0, 2.5);
        let (eff, t_pi) = effective_rabi(4, 1.0).unwrap();
        assert_eq!(eff, 2.0);
        assert_eq!(t_pi, PI / 2.0);
        assert!(effective_rabi(0, 1.0).is_err());
        assert!(effective_rabi(4, 0.0).is_err());
    }

    #[test]
    fn blockade_radius_scaling() {
        assert!((blockade_radius(3.0, 3.0).unwrap() - 1.0).abs() < 1e-15);
        let r1 = blockade_radius(5.0, 2.0).unwrap();
        let r2 = blockade_radius(5.0 * 64.0, 2.0).unwrap();
        assert!((r2 / r1 - 2.0).abs() < 1e-12);
        // C6/2pi = 500 GHz um^6, Omega/2pi = 10 MHz
        let c6 = TWO_PI * 500e9 * 1e-36;
        let r = blockade_radius(c6, TWO_PI * 10e6).unwrap();
        assert!((r - 5e4_f64.powf(1.0 / 6.0) * 1e-6).abs() < 1e-15);
        assert!((r * 1e6 - 6.07).abs() < 0.01);
        assert!(blockade_radius(0.0, 1.0).is_err());
        assert!(blockade_radius(1.0, -1.0).is_err());
    }

    #[test]
    fn params_validation() {
        assert!(BlockadeParams::new(0, 1.0, 1.0).is_err());
        assert!(BlockadeParams::new(1, 0.0, 1.0).is_err());
        assert!(BlockadeParams::new(1, 1.0, -1.0).is_err());
        assert!(BlockadeParams::new(1, 1.0, f64::NAN).is_err());
        assert!(BlockadeParams::with_blockade_ratio(1, 1.0, -2.0).is_err());
        let p = BlockadeParams::operating_point().with_c6(1e-30).unwrap();
        assert!(p.blockade_radius().unwrap().is_ok());
    }

    #[test]
    fn operating_point_fidelity_and_populations() {
        let result = run_step1(&BlockadeParams::operating_point(), 200).unwrap();
        assert!(
            (result.bell_fidelity - 0.9993).abs() < 5e-4,
            "{}",
            result.bell_fidelity
        );
        for pops in &result.trajectory.populations {
            assert!((pops.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
        // the ground population halves during the control pulse
        let mid = 199;
        assert!((result.trajectory.populations[mid][GC_GE] - 0.5).abs() < 1e-9);
    }

    #[test]
    fn perfect_blockade_gives_exact_bell_state() {
        let p = BlockadeParams::perfect_blockade(1000, 1.0).unwrap();
        let result = run_step1(&p, 50).unwrap();
        assert!((result.bell_fidelity - 1.0).abs() < 1e-9);
        assert_eq!(result.max_leakage, 0.0);
    }

    #[test]
    fn fidelity_monotone_in_blockade_ratio() {
        let mut previous = 0.0;
        for ratio in [1.0, 2.0, 5.0, 10.0, 15.8, 30.0] {
            let p = BlockadeParams::with_blockade_ratio(1000, 1.0, ratio).unwrap();
            let f = run_step1(&p, 2).unwrap().bell_fidelity;
            assert!(f >= previous, "ratio {ratio}: {f} < {previous}");
            previous = f;
        }
    }

    #[test]
    fn leakage_falls_quadratically_with_blockade() {
        for ratio in [5.0, 10.0, 15.8] {
            let weak = BlockadeParams::with_blockade_ratio(1000, 1.0, ratio).unwrap();
            let strong = BlockadeParams::with_blockade_ratio(1000, 1.0, 2.0 * ratio).unwrap();
            let l_weak = run_step1(&weak, 4000).unwrap().max_leakage;
            let l_strong = run_step1(&strong, 4000).unwrap().max_leakage;
            assert!(
                l_weak / l_strong >= 3.0,
                "ratio {ratio}: {l_weak} / {l_strong}"
            );
        }
    }
}
