//! Cross-checks against independent computations and invariants.

use std::f64::consts::PI;

use approx::assert_abs_diff_eq;
use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use rydnet::blockade::{self, BlockadeParams};
use rydnet::emission::{
    self, ArrayFactorModel, CloudGeometry, FiberAcceptance, MismatchConvention, MonteCarloCloud,
};
use rydnet::interference::{self, beamsplitter, ModeFrame, TwoPhotonState, DIM};
use rydnet::link::{self, LinkParams};
use rydnet::oracle;
use rydnet::quantum::{self, fidelity, HermitianOperator, PulseSegment, QuantumState};

const OMEGA: f64 = 2.0 * PI * 10e6;

fn hermitian(dim: usize, raw: &[f64]) -> HermitianOperator {
    let mut m = DMatrix::<C64>::zeros(dim, dim);
    let mut k = 0;
    for i in 0..dim {
        m[(i, i)] = C64::new(raw[k], 0.0);
        k += 1;
        for j in (i + 1)..dim {
            let z = C64::new(raw[k], raw[k + 1]);
            k += 2;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    HermitianOperator::new(m).unwrap()
}

fn state(raw: &[f64]) -> QuantumState {
    let amps = raw.chunks(2).map(|c| C64::new(c[0], c[1])).collect();
    QuantumState::normalized(amps, "test").unwrap()
}

#[test]
fn propagator_matches_rk4_on_step1() {
    for ratio in [2.0, 5.0, 15.8, 40.0] {
        let params = BlockadeParams::with_blockade_ratio(1000, OMEGA, ratio).unwrap();
        let segments = blockade::step1_segments(&params);
        let exact = quantum::evolve_piecewise(&blockade::initial_state(), &segments).unwrap();
        let rk4 = oracle::rk4_evolve(&blockade::initial_state(), &segments, 10_000);
        assert!(
            (exact.amplitudes() - rk4.amplitudes()).camax() < 1e-6,
            "ratio {ratio}"
        );
    }
}

#[test]
fn bell_fidelity_at_ratio_five_frozen() {
    // fixed by a separate matrix-exponential computation
    let params = BlockadeParams::with_blockade_ratio(1000, OMEGA, 5.0).unwrap();
    let segments = blockade::step1_segments(&params);
    let rk4 = oracle::rk4_evolve(&blockade::initial_state(), &segments, 100_000);
    let f_rk4 = fidelity(&rk4, &blockade::bell_target()).unwrap();
    let f = blockade::run_step1(&params, 2).unwrap().bell_fidelity;
    assert_abs_diff_eq!(f, 0.9749869683208234, epsilon = 1e-12);
    assert_abs_diff_eq!(f_rk4, f, epsilon = 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn evolution_is_unitary(
        h in prop::collection::vec(-5.0..5.0f64, 16),
        psi in prop::collection::vec(-1.0..1.0f64, 8).prop_filter("nonzero", |v| v.iter().any(|x| x.abs() > 1e-3)),
        t in 0.0..3.0f64,
    ) {
        let segment = PulseSegment::new(hermitian(4, &h), t).unwrap();
        let out = quantum::evolve_piecewise(&state(&psi), &[segment]).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn beamsplitter_preserves_norm(raw in prop::collection::vec(-1.0..1.0f64, 2 * DIM)) {
        let mut amplitudes = [C64::new(0.0, 0.0); DIM];
        for (a, c) in amplitudes.iter_mut().zip(raw.chunks(2)) {
            *a = C64::new(c[0], c[1]);
        }
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        for a in amplitudes.iter_mut() {
            *a /= norm;
        }
        let input = TwoPhotonState::from_amplitudes(amplitudes, ModeFrame::Input);
        let out = beamsplitter(&input).unwrap();
        prop_assert!((out.norm() - 1.0).abs() < 1e-12);
        let total: f64 = interference::all_outcomes(&out).unwrap().iter().map(|o| o.probability).sum();
        prop_assert!((total - 1.0).abs() < 1e-12);
    }
}

#[test]
fn consecutive_segments_compose() {
    let h = hermitian(
        4,
        &[
            0.3, 1.0, -0.2, 0.5, 0.1, 0.0, 0.7, -1.1, 0.4, 0.2, 0.0, 2.0, -0.6, 0.9, 0.3, -0.4,
        ],
    );
    let psi = blockade::initial_state();
    let split = [
        PulseSegment::new(h.clone(), 0.7).unwrap(),
        PulseSegment::new(h.clone(), 1.6).unwrap(),
    ];
    let whole = [PulseSegment::new(h, 2.3).unwrap()];
    let a = quantum::evolve_piecewise(&psi, &split).unwrap();
    let b = quantum::evolve_piecewise(&psi, &whole).unwrap();
    assert!((a.amplitudes() - b.amplitudes()).camax() < 1e-12);
}

#[test]
fn sampled_pattern_independent_of_atom_number() {
    let geometry = CloudGeometry::new(5.0, 0.05).unwrap();
    let small = MonteCarloCloud::sample(&geometry, 1_000, 7).unwrap();
    let large = MonteCarloCloud::sample(&geometry, 10_000, 8).unwrap();
    for deg in [0.5_f64, 1.0, 2.0, 3.0] {
        let theta = deg.to_radians();
        let a = small.intensity(theta, MismatchConvention::AxialProjection, 16);
        let b = large.intensity(theta, MismatchConvention::AxialProjection, 16);
        let sigma = (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!(
            (a.intensity - b.intensity).abs() <= 3.0 * sigma,
            "{deg} deg"
        );
    }
}

#[test]
fn sampled_cloud_is_deterministic() {
    let geometry = CloudGeometry::operating_point();
    let a = emission::array_factor_numeric(0.03, &geometry, 2_000, 11).unwrap();
    let b = emission::array_factor_numeric(0.03, &geometry, 2_000, 11).unwrap();
    assert_eq!(a.to_bits(), b.to_bits());
}

#[test]
fn directional_quadrature_converges() {
    let acceptance = FiberAcceptance::default();
    for model in [ArrayFactorModel::Sinc, ArrayFactorModel::SincTransverseDisk] {
        for (l, r) in [(1.0, 0.5), (10.0, 1.0), (20.0, 2.0)] {
            let geometry = CloudGeometry::new(l, r).unwrap();
            let coarse =
                emission::directional_efficiency(&geometry, &acceptance, model, 400).unwrap();
            let fine =
                emission::directional_efficiency(&geometry, &acceptance, model, 3200).unwrap();
            assert!((coarse - fine).abs() < 1e-3, "{model:?} L={l} R={r}");
        }
    }
}

#[test]
fn permanent_oracle_agrees_with_beamsplitter() {
    let by_permanent =
        oracle::two_photon_transfer_by_permanent(&interference::beamsplitter_matrix());
    let simulated = oracle::two_photon_transfer_from_simulator().unwrap();
    for (a, b) in by_permanent
        .iter()
        .flatten()
        .zip(simulated.iter().flatten())
    {
        assert_abs_diff_eq!(a, b, epsilon = 1e-12);
    }
}

#[test]
fn retry_simulation_matches_closed_form() {
    for p in [0.002, 0.005, 0.02] {
        let closed = link::cumulative_success(p, 100).unwrap()[99].1;
        let mc = link::simulate_retries(p, 100, 50_000, 3).unwrap();
        assert!(
            (mc.success_fraction - closed).abs() <= 3.0 * mc.std_error,
            "p={p}"
        );
    }
}

#[test]
fn rate_curves_ordered_by_node_efficiency() {
    let base = LinkParams::operating_point();
    for d in (0..=100).map(|k| k as f64 * 0.5) {
        let r: Vec<f64> = [0.15, 0.19, 0.25]
            .iter()
            .map(|&e| link::entanglement_rate(&base.with_eta_node(e).at_distance(d)).unwrap())
            .collect();
        assert!(r[0] < r[1] && r[1] < r[2], "d={d}");
    }
}
