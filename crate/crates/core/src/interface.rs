//! Atom-photon conversion: Raman transfer of the collective Rydberg
//! excitation to an optical excitation, directional emission into a
//! polarization-encoded photon, and node-efficiency bookkeeping.
//!
//! Both maps are ideal permutations of basis states; every loss is carried by
//! the scalar `eta_map` in [`NodeEfficiencyBreakdown`].

use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;

use crate::blockade;
use crate::error::{check_positive, check_range, Error, Result};
use crate::quantum::{QuantumState, NORM_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Control {
    /// Rydberg sublevel `m_j = +1/2`.
    RydbergPlus,
    /// Rydberg sublevel `m_j = -1/2`.
    RydbergMinus,
    Ground,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Ensemble {
    Ground,
    /// Collective Rydberg excitation.
    WRydberg,
    /// Collective optical excitation carrying the phase-matching phases.
    WOptical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Photon {
    Vacuum,
    H,
    V,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sublevel {
    Plus,
    Minus,
}

impl Sublevel {
    pub fn control(self) -> Control {
        match self {
            Sublevel::Plus => Control::RydbergPlus,
            Sublevel::Minus => Control::RydbergMinus,
        }
    }

    /// Polarization produced by emission from this sublevel after the
    /// quarter-wave plate.
    pub fn photon(self) -> Photon {
        match self {
            Sublevel::Plus => Photon::H,
            Sublevel::Minus => Photon::V,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stage {
    PreRaman,
    PostRaman,
    PostEmission,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::PreRaman => "pre_raman",
            Stage::PostRaman => "post_raman",
            Stage::PostEmission => "post_emission",
        }
    }
}

const CONTROLS: [Control; 3] = [Control::RydbergPlus, Control::RydbergMinus, Control::Ground];
const ENSEMBLES: [Ensemble; 3] = [Ensemble::Ground, Ensemble::WRydberg, Ensemble::WOptical];
const PHOTONS: [Photon; 3] = [Photon::Vacuum, Photon::H, Photon::V];

/// Dimension of the atom-photon space: every control/ensemble pair with no
/// photon, plus each control with the ensemble in its ground state and one
/// H or V photon.
pub const DIM: usize = 15;

pub const BASIS: &str = "control x ensemble x photon (physical)";

/// Position of a basis ket, or `None` for a photon paired with an ensemble
/// excitation (not part of the space).
pub fn basis_index(control: Control, ensemble: Ensemble, photon: Photon) -> Option<usize> {
    let c = CONTROLS.iter().position(|&x| x == control)?;
    match photon {
        Photon::Vacuum => {
            let e = ENSEMBLES.iter().position(|&x| x == ensemble)?;
            Some(3 * c + e)
        }
        Photon::H | Photon::V if ensemble == Ensemble::Ground => {
            let p = if photon == Photon::H { 0 } else { 1 };
            Some(9 + 2 * c + p)
        }
        _ => None,
    }
}

/// Inverse of [`basis_index`].
pub fn basis_label(index: usize) -> (Control, Ensemble, Photon) {
    assert!(index < DIM, "basis index {index} out of range");
    if index < 9 {
        (CONTROLS[index / 3], ENSEMBLES[index % 3], Photon::Vacuum)
    } else {
        let k = index - 9;
        let photon = if k.is_multiple_of(2) {
            Photon::H
        } else {
            Photon::V
        };
        (CONTROLS[k / 2], Ensemble::Ground, photon)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AtomPhotonState {
    amplitudes: [C64; DIM],
    stage: Stage,
}

impl AtomPhotonState {
    /// Builds a state from `(control, ensemble, photon, amplitude)` terms.
    /// Repeated kets add; the result must have unit norm.
    pub fn from_terms(terms: &[(Control, Ensemble, Photon, C64)], stage: Stage) -> Result<Self> {
        let mut amplitudes = [C64::new(0.0, 0.0); DIM];
        for &(c, e, p, amp) in terms {
            let idx = basis_index(c, e, p).ok_or_else(|| {
                Error::param("terms", format!("{c:?},{e:?},{p:?} is not a physical ket"))
            })?;
            amplitudes[idx] += amp;
        }
        let state = Self { amplitudes, stage };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::param(
                "terms",
                format!("state norm is {norm}, expected 1"),
            ));
        }
        Ok(state)
    }

    /// Embeds a four-level blockade state with no photon, taking `r_c` to be
    /// the given Rydberg sublevel.
    pub fn from_step1(state: &QuantumState, sublevel: Sublevel) -> Result<Self> {
        if state.dim() != 4 {
            return Err(Error::DimensionMismatch {
                expected: 4,
                found: state.dim(),
            });
        }
        let r = sublevel.control();
        let v = Photon::Vacuum;
        Self::from_terms(
            &[
                (
                    Control::Ground,
                    Ensemble::Ground,
                    v,
                    state.amplitude(blockade::GC_GE),
                ),
                (r, Ensemble::Ground, v, state.amplitude(blockade::RC_GE)),
                (
                    Control::Ground,
                    Ensemble::WRydberg,
                    v,
                    state.amplitude(blockade::GC_W),
                ),
                (r, Ensemble::WRydberg, v, state.amplitude(blockade::RC_W)),
            ],
            Stage::PreRaman,
        )
    }

    pub fn stage(&self) -> Stage {
        self.stage
    }

    pub fn amplitudes(&self) -> &[C64; DIM] {
        &self.amplitudes
    }

    /// Amplitude of a ket; zero for kets outside the space.
    pub fn amplitude(&self, control: Control, ensemble: Ensemble, photon: Photon) -> C64 {
        basis_index(control, ensemble, photon)
            .map(|i| self.amplitudes[i])
            .unwrap_or_default()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Largest absolute difference between amplitude vectors.
    pub fn distance(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `|<other|self>|^2`.
    pub fn fidelity(&self, other: &Self) -> f64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| b.conj() * a)
            .sum::<C64>()
            .norm_sqr()
    }

    fn require(&self, expected: Stage) -> Result<()> {
        if self.stage != expected {
            return Err(Error::WrongStage {
                expected: expected.name(),
                found: self.stage.name(),
            });
        }
        Ok(())
    }

    fn swap(&mut self, a: (Control, Ensemble, Photon), b: (Control, Ensemble, Photon)) {
        let i = basis_index(a.0, a.1, a.2).expect("physical ket");
        let j = basis_index(b.0, b.1, b.2).expect("physical ket");
        self.amplitudes.swap(i, j);
    }

    /// Keeps only terms whose control atom is `control`, without renormalizing.
    fn project_control(&self, control: Control) -> [C64; DIM] {
        let mut out = self.amplitudes;
        for (i, amp) in out.iter_mut().enumerate() {
            if basis_label(i).0 != control {
                *amp = C64::new(0.0, 0.0);
            }
        }
        out
    }

    /// Probability of detecting an H or V photon, respectively.
    pub fn polarization_populations(&self) -> (f64, f64) {
        let mut h = 0.0;
        let mut v = 0.0;
        for (i, amp) in self.amplitudes.iter().enumerate() {
            match basis_label(i).2 {
                Photon::H => h += amp.norm_sqr(),
                Photon::V => v += amp.norm_sqr(),
                Photon::Vacuum => {}
            }
        }
        (h, v)
    }

    /// Coefficient matrix with rows indexed by the control state and columns
    /// by (ensemble, photon).
    fn control_split(&self) -> DMatrix<C64> {
        let mut m = DMatrix::from_element(3, 9, C64::new(0.0, 0.0));
        for (i, amp) in self.amplitudes.iter().enumerate() {
            let (c, e, p) = basis_label(i);
            let row = CONTROLS.iter().position(|&x| x == c).unwrap();
            let col = 3 * ENSEMBLES.iter().position(|&x| x == e).unwrap()
                + PHOTONS.iter().position(|&x| x == p).unwrap();
            m[(row, col)] = *amp;
        }
        m
    }

    /// Reduced density matrix of the control atom, ordered
    /// `[r(+1/2), r(-1/2), g]`.
    pub fn control_density_matrix(&self) -> DMatrix<C64> {
        let m = self.control_split();
        &m * m.adjoint()
    }

    pub fn control_purity(&self) -> f64 {
        let rho = self.control_density_matrix();
        (&rho * &rho).trace().re
    }

    /// Schmidt coefficients across the control | (ensemble, photon) cut, in
    /// decreasing order.
    pub fn schmidt_coefficients(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self
            .control_split()
            .svd(false, false)
            .singular_values
            .iter()
            .copied()
            .collect();
        values.sort_by(|a, b| b.total_cmp(a));
        values
    }
}

impl fmt::Display for AtomPhotonState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, amp) in self.amplitudes.iter().enumerate() {
            if amp.norm() < 1e-15 {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            let (c, e, p) = basis_label(i);
            write!(f, "({:.6}{:+.6}i)|{c:?},{e:?},{p:?}>", amp.re, amp.im)?;
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// Transfers `|W_Ryd>` to `|W_e>` with unit amplitude; every other ket is
/// untouched.
pub fn raman_map(state: &AtomPhotonState) -> Result<AtomPhotonState> {
    state.require(Stage::PreRaman)?;
    let mut out = state.clone();
    for c in CONTROLS {
        out.swap(
            (c, Ensemble::WRydberg, Photon::Vacuum),
            (c, Ensemble::WOptical, Photon::Vacuum),
        );
    }
    out.stage = Stage::PostRaman;
    Ok(out)
}

/// Empties `|W_e>` into a photon along the phase-matched direction:
/// `|x,W_e>|0> -> |x,G_e>|H>` for the `+1/2` sublevel and `|V>` for `-1/2`.
pub fn emission_map(state: &AtomPhotonState, sublevel: Sublevel) -> Result<AtomPhotonState> {
    state.require(Stage::PostRaman)?;
    let mut out = state.clone();
    for c in CONTROLS {
        out.swap(
            (c, Ensemble::WOptical, Photon::Vacuum),
            (c, Ensemble::Ground, sublevel.photon()),
        );
    }
    out.stage = Stage::PostEmission;
    Ok(out)
}

/// Polarization-entangled atom-photon state
/// `(|r+,G_e>|H> + |r-,G_e>|V>)/sqrt2`.
///
/// Starts from the control atom in an equal superposition of both Rydberg
/// sublevels with one collective Rydberg excitation in the ensemble, then
/// applies the Raman and emission maps branch by branch.
pub fn build_psi2() -> AtomPhotonState {
    let s = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let initial = AtomPhotonState::from_terms(
        &[
            (Control::RydbergPlus, Ensemble::WRydberg, Photon::Vacuum, s),
            (Control::RydbergMinus, Ensemble::WRydberg, Photon::Vacuum, s),
        ],
        Stage::PreRaman,
    )
    .expect("normalized initial state");
    let mapped = raman_map(&initial).expect("pre-Raman input");

    let mut amplitudes = [C64::new(0.0, 0.0); DIM];
    for sublevel in [Sublevel::Plus, Sublevel::Minus] {
        let branch = AtomPhotonState {
            amplitudes: mapped.project_control(sublevel.control()),
            stage: Stage::PostRaman,
        };
        let emitted = emission_map(&branch, sublevel).expect("post-Raman branch");
        for (acc, amp) in amplitudes.iter_mut().zip(emitted.amplitudes) {
            *acc += amp;
        }
    }
    AtomPhotonState {
        amplitudes,
        stage: Stage::PostEmission,
    }
}

/// Default memory retrieval efficiency.
pub const DEFAULT_ETA_RETRIEVAL: f64 = 0.55;
/// Default memory coherence time, seconds.
pub const DEFAULT_T2_MEMORY: f64 = 100e-6;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeEfficiencyBreakdown {
    pub f_gate: f64,
    pub eta_dir: f64,
    pub eta_map: f64,
    pub eta_node: f64,
    /// Reported only; not part of `eta_node`.
    pub eta_retrieval: f64,
    pub t2_memory: f64,
}

impl NodeEfficiencyBreakdown {
    pub fn with_memory(mut self, eta_retrieval: f64, t2_memory: f64) -> Result<Self> {
        check_range("eta_retrieval", eta_retrieval, 0.0, 1.0)?;
        check_positive("t2_memory", t2_memory)?;
        self.eta_retrieval = eta_retrieval;
        self.t2_memory = t2_memory;
        Ok(self)
    }

    /// Flat `(key, value)` record.
    pub fn to_record(&self) -> Vec<(&'static str, f64)> {
        vec![
            ("f_gate", self.f_gate),
            ("eta_dir", self.eta_dir),
            ("eta_map", self.eta_map),
            ("eta_node", self.eta_node),
            ("eta_retrieval", self.eta_retrieval),
            ("t2_memory_s", self.t2_memory),
        ]
    }
}

/// `eta_node = F_gate * eta_dir * eta_map`.
pub fn node_efficiency(f_gate: f64, eta_dir: f64, eta_map: f64) -> Result<NodeEfficiencyBreakdown> {
    check_range("f_gate", f_gate, 0.0, 1.0)?;
    check_range("eta_dir", eta_dir, 0.0, 1.0)?;
    check_range("eta_map", eta_map, 0.0, 1.0)?;
    Ok(NodeEfficiencyBreakdown {
        f_gate,
        eta_dir,
        eta_map,
        eta_node: f_gate * eta_dir * eta_map,
        eta_retrieval: DEFAULT_ETA_RETRIEVAL,
        t2_memory: DEFAULT_T2_MEMORY,
    })
}
