//! Independent reference computations used to cross-check the main code
//! paths. Nothing in the simulator itself calls into this module.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::interference::{self, ModeFrame, TwoPhotonState, PATTERNS, PATTERN_MODES};
use crate::quantum::{PulseSegment, QuantumState};
use crate::Result;

/// Fixed-step classical Runge-Kutta integration of `d psi/dt = -i H psi`,
/// with `steps_per_segment` steps in every non-empty segment.
pub fn rk4_evolve(
    state: &QuantumState,
    segments: &[PulseSegment],
    steps_per_segment: usize,
) -> QuantumState {
    let minus_i = C64::new(0.0, -1.0);
    let mut psi: DVector<C64> = state.amplitudes().clone();
    for segment in segments.iter().filter(|s| s.duration() > 0.0) {
        let h = segment.hamiltonian();
        let dt = segment.duration() / steps_per_segment as f64;
        let deriv = |v: &DVector<C64>| h.apply(v) * minus_i;
        for _ in 0..steps_per_segment {
            let k1 = deriv(&psi);
            let k2 = deriv(&(&psi + &k1 * C64::new(dt / 2.0, 0.0)));
            let k3 = deriv(&(&psi + &k2 * C64::new(dt / 2.0, 0.0)));
            let k4 = deriv(&(&psi + &k3 * C64::new(dt, 0.0)));
            psi += (k1 + k2 * C64::new(2.0, 0.0) + k3 * C64::new(2.0, 0.0) + k4)
                * C64::new(dt / 6.0, 0.0);
        }
    }
    QuantumState::from_vector_unchecked(psi, state.basis())
}

fn factorial_sqrt(m1: usize, m2: usize) -> f64 {
    if m1 == m2 {
        std::f64::consts::SQRT_2
    } else {
        1.0
    }
}

/// Two-photon transfer matrix `T[out][in]` over the ten occupation patterns,
/// from the permanent formula
/// `<n_out|U|n_in> = perm(U[out modes, in modes]) / sqrt(prod n_in! prod n_out!)`.
pub fn two_photon_transfer_by_permanent(u: &[[f64; 4]; 4]) -> [[f64; PATTERNS]; PATTERNS] {
    let mut t = [[0.0; PATTERNS]; PATTERNS];
    for (row, &(o1, o2)) in PATTERN_MODES.iter().enumerate() {
        for (col, &(i1, i2)) in PATTERN_MODES.iter().enumerate() {
            let permanent = u[o1][i1] * u[o2][i2] + u[o1][i2] * u[o2][i1];
            t[row][col] = permanent / (factorial_sqrt(i1, i2) * factorial_sqrt(o1, o2));
        }
    }
    t
}

/// The same transfer matrix read off column by column from
/// [`interference::beamsplitter`] applied to each input pattern.
pub fn two_photon_transfer_from_simulator() -> Result<[[f64; PATTERNS]; PATTERNS]> {
    let mut t = [[0.0; PATTERNS]; PATTERNS];
    for col in 0..PATTERNS {
        let mut amplitudes = [C64::new(0.0, 0.0); interference::DIM];
        amplitudes[col] = C64::new(1.0, 0.0);
        let out = interference::beamsplitter(&TwoPhotonState::from_amplitudes(
            amplitudes,
            ModeFrame::Input,
        ))?;
        for (row, entry) in t.iter_mut().enumerate() {
            let amp = out.amplitude(0, row);
            debug_assert!(amp.im == 0.0);
            entry[col] = amp.re;
        }
    }
    Ok(t)
}
