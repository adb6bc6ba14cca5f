//! Two-photon interference of the photons from two nodes on a 50:50
//! beamsplitter and heralded projection of the remote atoms.
//!
//! Photonic modes are indexed `2 * port + polarization` with polarization
//! `H = 0`, `V = 1`. In the input frame port 0 is `a` (node A) and port 1 is
//! `b` (node B); in the output frame they are the detector ports `c` and `d`.
//! Amplitudes always refer to normalized Fock states, so a doubly occupied
//! mode `|2>` carries the `1/sqrt(2!)` of `(a^dagger)^2 |0>`.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64 as C64;

use crate::error::{check_range, Error, Result};
use crate::interface::{AtomPhotonState, Control, Ensemble, Photon, Stage};
use crate::quantum::{QuantumState, NORM_TOLERANCE};

/// Number of two-photon occupation patterns over four modes.
pub const PATTERNS: usize = 10;
pub const SPIN_DIM: usize = 4;
pub const DIM: usize = SPIN_DIM * PATTERNS;

pub const SPIN_BASIS: &str = "++,+-,-+,--";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Spin {
    Plus,
    Minus,
}

impl Spin {
    fn bit(self) -> usize {
        match self {
            Spin::Plus => 0,
            Spin::Minus => 1,
        }
    }
}

/// Index of `|s_A s_B>` in the order `++, +-, -+, --`.
pub fn spin_index(a: Spin, b: Spin) -> usize {
    2 * a.bit() + b.bit()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    fn bit(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }
}

/// Mode index for a photon in `port` (0 or 1) with polarization `pol`.
pub fn mode(port: usize, pol: Polarization) -> usize {
    2 * port + pol.bit()
}

/// The unordered mode pair `(i, j)` with `i <= j` of each pattern, in storage
/// order.
pub const PATTERN_MODES: [(usize, usize); PATTERNS] = [
    (0, 0),
    (0, 1),
    (0, 2),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 3),
    (2, 2),
    (2, 3),
    (3, 3),
];

pub fn pattern_index(m1: usize, m2: usize) -> usize {
    let key = (m1.min(m2), m1.max(m2));
    PATTERN_MODES
        .iter()
        .position(|&p| p == key)
        .expect("mode indices are below 4")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeFrame {
    Input,
    Output,
}

impl ModeFrame {
    fn name(self) -> &'static str {
        match self {
            ModeFrame::Input => "input",
            ModeFrame::Output => "output",
        }
    }
}

/// Two remote spins jointly with two photons in four modes.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoPhotonState {
    amplitudes: [C64; DIM],
    frame: ModeFrame,
}

impl TwoPhotonState {
    /// Builds a state from `(spin_a, spin_b, mode_1, mode_2, amplitude)`
    /// terms, where the modes name the normalized Fock state with one photon
    /// in each (two in one mode if they coincide).
    pub fn from_terms(terms: &[(Spin, Spin, usize, usize, C64)], frame: ModeFrame) -> Result<Self> {
        let mut amplitudes = [C64::new(0.0, 0.0); DIM];
        for &(a, b, m1, m2, amp) in terms {
            if m1 > 3 || m2 > 3 {
                return Err(Error::param(
                    "terms",
                    format!("mode ({m1},{m2}) out of range"),
                ));
            }
            amplitudes[spin_index(a, b) * PATTERNS + pattern_index(m1, m2)] += amp;
        }
        let state = Self { amplitudes, frame };
        let norm = state.norm();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::param(
                "terms",
                format!("state norm is {norm}, expected 1"),
            ));
        }
        Ok(state)
    }

    /// Raw amplitude vector, without a norm check.
    pub fn from_amplitudes(amplitudes: [C64; DIM], frame: ModeFrame) -> Self {
        Self { amplitudes, frame }
    }

    pub fn frame(&self) -> ModeFrame {
        self.frame
    }

    pub fn amplitudes(&self) -> &[C64; DIM] {
        &self.amplitudes
    }

    pub fn amplitude(&self, spin: usize, pattern: usize) -> C64 {
        self.amplitudes[spin * PATTERNS + pattern]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    fn require(&self, expected: ModeFrame) -> Result<()> {
        if self.frame != expected {
            return Err(Error::WrongFrame {
                expected: expected.name(),
                found: self.frame.name(),
            });
        }
        Ok(())
    }
}

fn spin_and_polarization(control: Control, photon: Photon) -> Result<(Spin, Polarization)> {
    let spin = match control {
        Control::RydbergPlus => Spin::Plus,
        Control::RydbergMinus => Spin::Minus,
        Control::Ground => {
            return Err(Error::param(
                "state",
                "control atom must be in a Rydberg sublevel to carry the spin qubit",
            ))
        }
    };
    let pol = match photon {
        Photon::H => Polarization::H,
        Photon::V => Polarization::V,
        Photon::Vacuum => unreachable!("vacuum terms are filtered by the caller"),
    };
    Ok((spin, pol))
}

/// Non-negligible `(spin, polarization, amplitude)` terms of a one-node state.
fn node_terms(state: &AtomPhotonState) -> Result<Vec<(Spin, Polarization, C64)>> {
    if state.stage() != Stage::PostEmission {
        return Err(Error::WrongStage {
            expected: Stage::PostEmission.name(),
            found: state.stage().name(),
        });
    }
    let mut terms = Vec::new();
    for (i, &amp) in state.amplitudes().iter().enumerate() {
        if amp.norm() <= 1e-12 {
            continue;
        }
        let (control, ensemble, photon) = crate::interface::basis_label(i);
        if photon == Photon::Vacuum {
            return Err(Error::PhotonMissing {
                amplitude: amp.norm(),
            });
        }
        debug_assert_eq!(ensemble, Ensemble::Ground);
        let (spin, pol) = spin_and_polarization(control, photon)?;
        terms.push((spin, pol, amp));
    }
    Ok(terms)
}

/// Tensor product of two single-photon node states, with node A's photon in
/// input port `a` and node B's in port `b`.
pub fn joint_state(psi_a: &AtomPhotonState, psi_b: &AtomPhotonState) -> Result<TwoPhotonState> {
    let terms_a = node_terms(psi_a)?;
    let terms_b = node_terms(psi_b)?;
    let mut amplitudes = [C64::new(0.0, 0.0); DIM];
    for &(sa, pa, amp_a) in &terms_a {
        for &(sb, pb, amp_b) in &terms_b {
            let idx = spin_index(sa, sb) * PATTERNS + pattern_index(mode(0, pa), mode(1, pb));
            amplitudes[idx] += amp_a * amp_b;
        }
    }
    Ok(TwoPhotonState {
        amplitudes,
        frame: ModeFrame::Input,
    })
}

/// Single-photon mode transformation, `out[i] = sum_j U[i][j] in[j]`, for
/// `a -> (c + d)/sqrt2`, `b -> (c - d)/sqrt2` in each polarization.
pub fn beamsplitter_matrix() -> [[f64; 4]; 4] {
    let s = FRAC_1_SQRT_2;
    let mut u = [[0.0; 4]; 4];
    for pol in [Polarization::H, Polarization::V] {
        let (a, b) = (mode(0, pol), mode(1, pol));
        let (c, d) = (mode(0, pol), mode(1, pol));
        u[c][a] = s;
        u[d][a] = s;
        u[c][b] = s;
        u[d][b] = -s;
    }
    u
}

/// Expands each input creation-operator monomial through the single-photon
/// transformation and re-collects the result in normalized Fock states.
pub fn beamsplitter(state: &TwoPhotonState) -> Result<TwoPhotonState> {
    state.require(ModeFrame::Input)?;
    let u = beamsplitter_matrix();
    let mut out = [C64::new(0.0, 0.0); DIM];
    for spin in 0..SPIN_DIM {
        for (p, &(m1, m2)) in PATTERN_MODES.iter().enumerate() {
            let amp = state.amplitudes[spin * PATTERNS + p];
            if amp == C64::new(0.0, 0.0) {
                continue;
            }
            // |1 1> = a1+ a2+ |0>, |2> = (a+)^2 |0> / sqrt2
            let input_norm = if m1 == m2 { FRAC_1_SQRT_2 } else { 1.0 };
            for i in 0..4 {
                for j in 0..4 {
                    let coeff = u[i][m1] * u[j][m2];
                    if coeff == 0.0 {
                        continue;
                    }
                    // c_i+ c_j+ |0> in normalized Fock states
                    let output_norm = if i == j {
                        std::f64::consts::SQRT_2
                    } else {
                        1.0
                    };
                    out[spin * PATTERNS + pattern_index(i, j)] +=
                        amp * (input_norm * coeff * output_norm);
                }
            }
        }
    }
    Ok(TwoPhotonState {
        amplitudes: out,
        frame: ModeFrame::Output,
    })
}

/// Detector click patterns in the output frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum HeraldPattern {
    HcVd,
    VcHd,
    HcHd,
    VcVd,
    HcVc,
    HdVd,
    TwoHc,
    TwoVc,
    TwoHd,
    TwoVd,
}

impl HeraldPattern {
    pub const ALL: [HeraldPattern; PATTERNS] = [
        HeraldPattern::HcVd,
        HeraldPattern::VcHd,
        HeraldPattern::HcHd,
        HeraldPattern::VcVd,
        HeraldPattern::HcVc,
        HeraldPattern::HdVd,
        HeraldPattern::TwoHc,
        HeraldPattern::TwoVc,
        HeraldPattern::TwoHd,
        HeraldPattern::TwoVd,
    ];

    /// The two patterns that herald an entangled pair.
    pub const HERALDING: [HeraldPattern; 2] = [HeraldPattern::HcVd, HeraldPattern::VcHd];

    pub fn name(self) -> &'static str {
        match self {
            HeraldPattern::HcVd => "Hc_Vd",
            HeraldPattern::VcHd => "Vc_Hd",
            HeraldPattern::HcHd => "Hc_Hd",
            HeraldPattern::VcVd => "Vc_Vd",
            HeraldPattern::HcVc => "Hc_Vc",
            HeraldPattern::HdVd => "Hd_Vd",
            HeraldPattern::TwoHc => "2Hc",
            HeraldPattern::TwoVc => "2Vc",
            HeraldPattern::TwoHd => "2Hd",
            HeraldPattern::TwoVd => "2Vd",
        }
    }

    /// Output modes occupied by the two photons.
    pub fn modes(self) -> (usize, usize) {
        use Polarization::{H, V};
        let (c, d) = (0, 1);
        match self {
            HeraldPattern::HcVd => (mode(c, H), mode(d, V)),
            HeraldPattern::VcHd => (mode(c, V), mode(d, H)),
            HeraldPattern::HcHd => (mode(c, H), mode(d, H)),
            HeraldPattern::VcVd => (mode(c, V), mode(d, V)),
            HeraldPattern::HcVc => (mode(c, H), mode(c, V)),
            HeraldPattern::HdVd => (mode(d, H), mode(d, V)),
            HeraldPattern::TwoHc => (mode(c, H), mode(c, H)),
            HeraldPattern::TwoVc => (mode(c, V), mode(c, V)),
            HeraldPattern::TwoHd => (mode(d, H), mode(d, H)),
            HeraldPattern::TwoVd => (mode(d, V), mode(d, V)),
        }
    }

    pub fn pattern_index(self) -> usize {
        let (m1, m2) = self.modes();
        pattern_index(m1, m2)
    }
}

impl fmt::Display for HeraldPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HeraldPattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HeraldPattern::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::UnknownPattern(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct HeraldOutcome {
    pub pattern: HeraldPattern,
    pub probability: f64,
    /// Normalized post-measurement state of the two spins; `None` when the
    /// pattern cannot occur.
    pub atomic_state: Option<QuantumState>,
}

/// Probabilities below this are treated as impossible outcomes.
const ZERO_PROBABILITY: f64 = 1e-24;

/// Projects onto one detector pattern.
pub fn herald(state: &TwoPhotonState, pattern: HeraldPattern) -> Result<HeraldOutcome> {
    state.require(ModeFrame::Output)?;
    let p = pattern.pattern_index();
    let spins: Vec<C64> = (0..SPIN_DIM).map(|s| state.amplitude(s, p)).collect();
    let probability: f64 = spins.iter().map(|a| a.norm_sqr()).sum();
    let atomic_state = if probability > ZERO_PROBABILITY {
        Some(QuantumState::normalized(spins, SPIN_BASIS)?)
    } else {
        None
    };
    Ok(HeraldOutcome {
        pattern,
        probability,
        atomic_state,
    })
}

/// Outcomes for every detector pattern, in [`HeraldPattern::ALL`] order.
pub fn all_outcomes(state: &TwoPhotonState) -> Result<Vec<HeraldOutcome>> {
    HeraldPattern::ALL
        .into_iter()
        .map(|p| herald(state, p))
        .collect()
}

/// Total probability of the cross-port, orthogonal-polarization patterns.
pub fn heralding_probability(state: &TwoPhotonState) -> Result<f64> {
    HeraldPattern::HERALDING
        .into_iter()
        .map(|p| herald(state, p).map(|o| o.probability))
        .sum()
}

/// `(|+-> - |-+>)/sqrt2`.
pub fn singlet() -> QuantumState {
    let s = FRAC_1_SQRT_2;
    QuantumState::new(
        vec![
            C64::new(0.0, 0.0),
            C64::new(s, 0.0),
            C64::new(-s, 0.0),
            C64::new(0.0, 0.0),
        ],
        SPIN_BASIS,
    )
    .expect("unit norm")
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VisibilityModel {
    visibility: f64,
}

impl VisibilityModel {
    pub fn new(visibility: f64) -> Result<Self> {
        check_range("visibility", visibility, 0.0, 1.0)?;
        Ok(Self { visibility })
    }

    pub fn visibility(&self) -> f64 {
        self.visibility
    }
}

/// Heralded two-spin state when the photons are only partly
/// indistinguishable: a mixture of the singlet (weight `V`) with the
/// classically correlated `|+-><+-|`, `|-+><-+|` pair, and its singlet
/// fidelity.
pub fn heralded_fidelity(model: &VisibilityModel) -> (f64, DMatrix<C64>) {
    let v = model.visibility;
    let psi = singlet();
    let ket = psi.amplitudes();
    let mut rho = ket * ket.adjoint() * C64::new(v, 0.0);
    let mixed = C64::new((1.0 - v) / 2.0, 0.0);
    rho[(1, 1)] += mixed;
    rho[(2, 2)] += mixed;
    let fidelity = ket.dotc(&(&rho * ket)).re;
    (fidelity, rho)
}

/// Checks Hermiticity, unit trace and positivity within `tolerance`.
pub fn is_valid_density_matrix(rho: &DMatrix<C64>, tolerance: f64) -> bool {
    if !rho.is_square() {
        return false;
    }
    let hermitian = (rho - rho.adjoint()).iter().all(|z| z.norm() <= tolerance);
    let trace_ok = (rho.trace() - C64::new(1.0, 0.0)).norm() <= tolerance;
    if !(hermitian && trace_ok) {
        return false;
    }
    SymmetricEigen::new(rho.clone())
        .eigenvalues
        .iter()
        .all(|&lambda| lambda >= -tolerance)
}
