//! Angular distribution of collectively emitted light and the fraction of it
//! collected by a fiber.
//!
//! Lengths are measured in units of the photon wavelength, so `k0 = 2 pi`.
//! The cloud is a uniform-density cylinder whose axis lies along the
//! phase-matched emission direction; `theta` is the polar angle from that
//! axis.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_positive, check_range, Error, Result};

/// Default fiber half-angle, 6 degrees.
pub const DEFAULT_THETA_MAX_DEG: f64 = 6.0;

/// Azimuths averaged by the Monte Carlo array factor.
pub const DEFAULT_AZIMUTHS: usize = 16;

/// Largest change in efficiency tolerated when the quadrature is refined.
pub const QUADRATURE_TOLERANCE: f64 = 1e-3;

/// Trapezoid nodes used for the Bessel integral of the transverse factor.
const BESSEL_NODES: usize = 128;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum DensityProfile {
    #[default]
    UniformCylinder,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CloudGeometry {
    length: f64,
    radius: f64,
    wavelength: Option<f64>,
    profile: DensityProfile,
}

impl CloudGeometry {
    /// `length` and `radius` are in units of the wavelength.
    pub fn new(length: f64, radius: f64) -> Result<Self> {
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::DegenerateGeometry(format!("cloud length {length}")));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(Error::DegenerateGeometry(format!("cloud radius {radius}")));
        }
        Ok(Self {
            length,
            radius,
            wavelength: None,
            profile: DensityProfile::UniformCylinder,
        })
    }

    /// L = 10 lambda, R = lambda.
    pub fn operating_point() -> Self {
        Self::new(10.0, 1.0).expect("valid geometry")
    }

    pub fn with_wavelength(mut self, wavelength: f64) -> Result<Self> {
        check_positive("wavelength", wavelength)?;
        self.wavelength = Some(wavelength);
        Ok(self)
    }

    pub fn length_over_lambda(&self) -> f64 {
        self.length
    }

    pub fn radius_over_lambda(&self) -> f64 {
        self.radius
    }

    pub fn wavelength(&self) -> Option<f64> {
        self.wavelength
    }

    pub fn profile(&self) -> DensityProfile {
        self.profile
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberAcceptance {
    theta_max: f64,
}

impl FiberAcceptance {
    pub fn new(theta_max: f64) -> Result<Self> {
        if !(theta_max > 0.0 && theta_max <= FRAC_PI_2) {
            return Err(Error::param(
                "theta_max",
                format!("{theta_max} rad is outside (0, pi/2]"),
            ));
        }
        Ok(Self { theta_max })
    }

    pub fn from_degrees(degrees: f64) -> Result<Self> {
        Self::new(degrees.to_radians())
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }
}

impl Default for FiberAcceptance {
    fn default() -> Self {
        Self::from_degrees(DEFAULT_THETA_MAX_DEG).expect("valid default")
    }
}

/// Which closed-form array factor to use for patterns and efficiencies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum ArrayFactorModel {
    /// Axial factor `sinc(k0 L sin(theta) / 2)` only; independent of R.
    #[default]
    Sinc,
    /// Axial sinc multiplied by the uniform-disk transverse factor.
    SincTransverseDisk,
}

impl ArrayFactorModel {
    pub fn name(&self) -> &'static str {
        match self {
            ArrayFactorModel::Sinc => "sinc",
            ArrayFactorModel::SincTransverseDisk => "sinc_transverse",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "sinc" => Some(ArrayFactorModel::Sinc),
            "sinc_transverse" => Some(ArrayFactorModel::SincTransverseDisk),
            _ => None,
        }
    }
}

/// `sin(x)/x` with `sinc(0) = 1`.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Amplitude array factor `sinc(pi (L/lambda) sin(theta))`.
pub fn array_factor_sinc(theta: f64, l_over_lambda: f64) -> f64 {
    sinc(PI * l_over_lambda * theta.sin())
}

/// Azimuthal average of `exp(i k0 sin(theta) x)` over a uniform disk of
/// radius `R`, i.e. `2 J1(u)/u` with `u = k0 R sin(theta)`.
///
/// `J1` is evaluated from its integral representation with the periodic
/// trapezoid rule, which converges geometrically for the arguments used here.
pub fn transverse_disk_factor(theta: f64, r_over_lambda: f64) -> f64 {
    let u = TAU * r_over_lambda * theta.sin();
    if u.abs() < 1e-6 {
        return 1.0 - u * u / 8.0;
    }
    // J1(u) = (1/pi) int_0^pi cos(tau - u sin tau) d tau
    //       = (1/2pi) int_0^2pi cos(tau - u sin tau) d tau
    let h = TAU / BESSEL_NODES as f64;
    let j1 = (0..BESSEL_NODES)
        .map(|k| {
            let tau = k as f64 * h;
            (tau - u * tau.sin()).cos()
        })
        .sum::<f64>()
        / BESSEL_NODES as f64;
    2.0 * j1 / u
}

/// Amplitude array factor of the selected model.
pub fn array_factor(model: ArrayFactorModel, geometry: &CloudGeometry, theta: f64) -> f64 {
    let axial = array_factor_sinc(theta, geometry.length);
    match model {
        ArrayFactorModel::Sinc => axial,
        ArrayFactorModel::SincTransverseDisk => {
            axial * transverse_disk_factor(theta, geometry.radius)
        }
    }
}

pub fn intensity(model: ArrayFactorModel, geometry: &CloudGeometry, theta: f64) -> f64 {
    array_factor(model, geometry, theta).powi(2)
}

/// How the phase mismatch `(k - k0) . r` is evaluated for sampled atoms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MismatchConvention {
    /// Full vector mismatch with `|k| = k0`: longitudinal part
    /// `k0 (cos(theta) - 1)` and transverse part `k0 sin(theta)`.
    #[default]
    FullVector,
    /// Only the projection `k0 sin(theta) z` along the cloud axis, the
    /// convention under which the thin-cloud limit is exactly the sinc.
    AxialProjection,
}

/// Intensity estimate from an explicit sum over sampled atoms.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MonteCarloIntensity {
    pub intensity: f64,
    /// Standard error of `intensity` from the finite atom sample.
    pub std_error: f64,
}

/// Atom positions drawn uniformly from the cylinder, in wavelengths.
#[derive(Clone, Debug, PartialEq)]
pub struct MonteCarloCloud {
    positions: Vec<[f64; 3]>,
}

impl MonteCarloCloud {
    pub fn sample(geometry: &CloudGeometry, n_atoms: usize, seed: u64) -> Result<Self> {
        if n_atoms < 100 {
            return Err(Error::param(
                "n_atoms_sampled",
                format!("{n_atoms} must be >= 100"),
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let positions = (0..n_atoms)
            .map(|_| {
                let rho = geometry.radius * rng.random::<f64>().sqrt();
                let phi = TAU * rng.random::<f64>();
                let z = geometry.length * (rng.random::<f64>() - 0.5);
                [rho * phi.cos(), rho * phi.sin(), z]
            })
            .collect();
        Ok(Self { positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    /// `|N^-1 sum_i exp(i dk . r_i)|^2` averaged over `azimuths` equally
    /// spaced azimuthal angles of the emission direction.
    pub fn intensity(
        &self,
        theta: f64,
        convention: MismatchConvention,
        azimuths: usize,
    ) -> MonteCarloIntensity {
        let n = self.positions.len() as f64;
        let azimuths = azimuths.max(1);
        let (sin_t, cos_t) = theta.sin_cos();
        let mut total = 0.0;
        let mut variance = 0.0;
        for j in 0..azimuths {
            let phi = TAU * j as f64 / azimuths as f64;
            let dk = match convention {
                MismatchConvention::FullVector => [
                    TAU * sin_t * phi.cos(),
                    TAU * sin_t * phi.sin(),
                    TAU * (cos_t - 1.0),
                ],
                MismatchConvention::AxialProjection => [0.0, 0.0, TAU * sin_t],
            };
            let sum: C64 = self
                .positions
                .iter()
                .map(|r| C64::from_polar(1.0, dk[0] * r[0] + dk[1] * r[1] + dk[2] * r[2]))
                .sum();
            let value = (sum / n).norm_sqr();
            total += value;
            // |F + e|^2 with E|e|^2 = (1 - |F|^2)/N
            let s2 = (1.0 - value).max(0.0) / n;
            variance += 2.0 * value * s2 + s2 * s2;
        }
        let m = azimuths as f64;
        MonteCarloIntensity {
            intensity: total / m,
            // azimuths share one position sample, so errors are not averaged down
            std_error: (variance / m).sqrt(),
        }
    }
}

/// Full-vector Monte Carlo intensity at one angle.
pub fn array_factor_numeric(
    theta: f64,
    geometry: &CloudGeometry,
    n_atoms_sampled: usize,
    seed: u64,
) -> Result<f64> {
    let cloud = MonteCarloCloud::sample(geometry, n_atoms_sampled, seed)?;
    Ok(cloud
        .intensity(theta, MismatchConvention::FullVector, DEFAULT_AZIMUTHS)
        .intensity)
}

fn weighted_intensity(model: ArrayFactorModel, geometry: &CloudGeometry, theta: f64) -> f64 {
    intensity(model, geometry, theta) * theta.sin()
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let n = intervals + intervals % 2;
    let h = (b - a) / n as f64;
    let interior: f64 = (1..n)
        .map(|k| {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            w * f(a + k as f64 * h)
        })
        .sum();
    (f(a) + interior + f(b)) * h / 3.0
}

fn efficiency_ratio(
    model: ArrayFactorModel,
    geometry: &CloudGeometry,
    theta_max: f64,
    intervals: usize,
) -> f64 {
    let f = |theta| weighted_intensity(model, geometry, theta);
    let collected = simpson(f, 0.0, theta_max, intervals);
    let total = simpson(f, 0.0, FRAC_PI_2, intervals);
    (collected / total).clamp(0.0, 1.0)
}

/// Fraction of emitted intensity inside the fiber cone, by composite Simpson
/// quadrature over `theta` with `sin(theta)` weight.
///
/// The estimate is repeated with twice the number of points and the finer
/// value is returned; a change larger than [`QUADRATURE_TOLERANCE`] is an
/// error.
pub fn directional_efficiency(
    geometry: &CloudGeometry,
    acceptance: &FiberAcceptance,
    model: ArrayFactorModel,
    quadrature_points: usize,
) -> Result<f64> {
    if quadrature_points < 200 {
        return Err(Error::param(
            "quadrature_points",
            format!("{quadrature_points} must be >= 200"),
        ));
    }
    let coarse = efficiency_ratio(model, geometry, acceptance.theta_max, quadrature_points);
    let fine = efficiency_ratio(model, geometry, acceptance.theta_max, 2 * quadrature_points);
    let change = (fine - coarse).abs();
    if change > QUADRATURE_TOLERANCE {
        return Err(Error::NonConvergence { change });
    }
    Ok(fine)
}

/// `(theta, intensity)` normalized to 1 in the forward direction.
pub fn emission_pattern_curve(
    geometry: &CloudGeometry,
    model: ArrayFactorModel,
    theta_grid: &[f64],
) -> Result<Vec<(f64, f64)>> {
    let forward = intensity(model, geometry, 0.0);
    theta_grid
        .iter()
        .map(|&theta| {
            check_range("theta", theta, 0.0, FRAC_PI_2)?;
            Ok((theta, intensity(model, geometry, theta) / forward))
        })
        .collect()
}

/// `n` equally spaced angles covering `[0, pi/2]`.
pub fn theta_grid(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n)
            .map(|k| FRAC_PI_2 * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64) -> f64 {
    let f_lo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (f(mid) > 0.0) == (f_lo > 0.0) {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Angle of the first zero of the amplitude, located by scanning for the
/// first sign change and bisecting. `None` when the main lobe extends past
/// 90 degrees.
pub fn first_null_angle(model: ArrayFactorModel, geometry: &CloudGeometry) -> Option<f64> {
    let f = |theta| array_factor(model, geometry, theta);
    let grid = theta_grid(4001);
    grid.windows(2)
        .find(|w| f(w[1]) <= 0.0)
        .map(|w| bisect(f, w[0], w[1]))
}

/// Angle at which the intensity first drops to half its forward value.
pub fn half_maximum_angle(model: ArrayFactorModel, geometry: &CloudGeometry) -> Option<f64> {
    let f = |theta| intensity(model, geometry, theta) - 0.5;
    let grid = theta_grid(4001);
    grid.windows(2)
        .find(|w| f(w[1]) <= 0.0)
        .map(|w| bisect(f, w[0], w[1]))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EmissionParams {
    n_atoms: u64,
    gamma0: f64,
}

impl EmissionParams {
    /// `gamma0` is the single-atom decay rate in s^-1 (a linear rate).
    pub fn new(n_atoms: u64, gamma0: f64) -> Result<Self> {
        if n_atoms < 1 {
            return Err(Error::param("n_atoms", "must be >= 1"));
        }
        check_positive("gamma0", gamma0)?;
        Ok(Self { n_atoms, gamma0 })
    }

    pub fn collective_rate(&self) -> f64 {
        self.n_atoms as f64 * self.gamma0
    }
}

/// `1 / (N Gamma0)`.
pub fn collective_emission_time(params: &EmissionParams) -> f64 {
    1.0 / params.collective_rate()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn geom(l: f64, r: f64) -> CloudGeometry {
        CloudGeometry::new(l, r).unwrap()
    }

    #[test]
    fn sinc_forward_and_first_zero() {
        for l in [0.5, 1.0, 10.0, 37.0] {
            assert_eq!(array_factor_sinc(0.0, l), 1.0);
        }
        let theta = first_null_angle(ArrayFactorModel::Sinc, &geom(10.0, 1.0)).unwrap();
        assert!((theta.sin() - 0.1).abs() < 1e-12);
        assert!((theta.to_degrees() - 5.739).abs() < 0.001);
    }

    #[test]
    fn sinc_direct_evaluation_at_two_degrees() {
        // computed independently in double precision
        let expected = 0.8113540987151664;
        assert!((array_factor_sinc(2f64.to_radians(), 10.0) - expected).abs() < 1e-14);
    }

    #[test]
    fn transverse_factor_matches_bessel_series() {
        // 2 J1(u)/u = sum_k (-1)^k (u/2)^(2k) / (k! (k+1)!)
        let series = |u: f64| {
            let mut term = 1.0;
            let mut sum = 1.0;
            for k in 1..60 {
                term *= -(u / 2.0).powi(2) / (k as f64 * (k + 1) as f64);
                sum += term;
            }
            sum
        };
        for theta in [0.01, 0.2, 0.7, 1.2, FRAC_PI_2] {
            for r in [0.05, 0.5, 1.0, 2.0] {
                let u = TAU * r * f64::sin(theta);
                let got = transverse_disk_factor(theta, r);
                assert!((got - series(u)).abs() < 1e-12, "theta {theta} r {r}");
            }
        }
    }

    #[test]
    fn monte_carlo_forward_is_exact() {
        for seed in [0, 1, 99] {
            for n in [100, 1000] {
                let v = array_factor_numeric(0.0, &geom(5.0, 0.7), n, seed).unwrap();
                assert!((v - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn monte_carlo_requires_enough_atoms() {
        assert!(array_factor_numeric(0.1, &geom(5.0, 1.0), 99, 0).is_err());
    }

    #[test]
    fn degenerate_geometry_rejected() {
        assert!(matches!(
            CloudGeometry::new(0.0, 1.0),
            Err(Error::DegenerateGeometry(_))
        ));
        assert!(matches!(
            CloudGeometry::new(1.0, 0.0),
            Err(Error::DegenerateGeometry(_))
        ));
        assert!(CloudGeometry::new(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn forward_intensity_dominates_for_elongated_clouds() {
        for l in [5.0, 10.0, 20.0] {
            let cloud = MonteCarloCloud::sample(&geom(l, 0.5), 2000, 7).unwrap();
            let forward = cloud
                .intensity(0.0, MismatchConvention::FullVector, 8)
                .intensity;
            for theta in theta_grid(50) {
                let v = cloud
                    .intensity(theta, MismatchConvention::FullVector, 8)
                    .intensity;
                assert!(v <= forward + 1e-12);
            }
        }
    }

    #[test]
    fn efficiency_full_cone_is_one() {
        for model in [ArrayFactorModel::Sinc, ArrayFactorModel::SincTransverseDisk] {
            let eta = directional_efficiency(
                &geom(10.0, 1.0),
                &FiberAcceptance::new(FRAC_PI_2).unwrap(),
                model,
                400,
            )
            .unwrap();
            assert_eq!(eta, 1.0);
        }
    }

    #[test]
    fn efficiency_monotone_in_acceptance() {
        let g = geom(10.0, 1.0);
        let mut previous = 0.0;
        for k in 1..=20 {
            let theta_max = FRAC_PI_2 * k as f64 / 20.0;
            let eta = directional_efficiency(
                &g,
                &FiberAcceptance::new(theta_max).unwrap(),
                ArrayFactorModel::Sinc,
                400,
            )
            .unwrap();
            assert!((0.0..=1.0).contains(&eta));
            assert!(eta >= previous);
            previous = eta;
        }
    }

    #[test]
    fn efficiency_rejects_coarse_quadrature() {
        let err = directional_efficiency(
            &geom(10.0, 1.0),
            &FiberAcceptance::default(),
            ArrayFactorModel::Sinc,
            100,
        );
        assert!(err.is_err());
    }

    #[test]
    fn longer_clouds_collect_more() {
        let acc = FiberAcceptance::default();
        for model in [ArrayFactorModel::Sinc, ArrayFactorModel::SincTransverseDisk] {
            let short = directional_efficiency(&geom(1.0, 1.0), &acc, model, 400).unwrap();
            let long = directional_efficiency(&geom(10.0, 1.0), &acc, model, 400).unwrap();
            assert!(long > short, "{model:?}: {long} <= {short}");
        }
    }

    #[test]
    fn acceptance_validation() {
        assert!(FiberAcceptance::new(0.0).is_err());
        assert!(FiberAcceptance::new(FRAC_PI_2 + 1e-9).is_err());
        assert!((FiberAcceptance::default().theta_max() - 0.104_72).abs() < 1e-5);
    }

    #[test]
    fn pattern_shapes() {
        let grid = theta_grid(91);
        let wide = emission_pattern_curve(&geom(1.0, 1.0), ArrayFactorModel::Sinc, &grid).unwrap();
        assert_eq!(wide[0].1, 1.0);
        let at_30 = wide
            .iter()
            .find(|(t, _)| (t.to_degrees() - 30.0).abs() < 1e-9)
            .unwrap();
        assert!(at_30.1 > 0.3);

        let g = geom(10.0, 1.0);
        let null = first_null_angle(ArrayFactorModel::Sinc, &g).unwrap();
        let lobe: Vec<f64> = (0..=200).map(|k| null * k as f64 / 200.0).collect();
        let curve = emission_pattern_curve(&g, ArrayFactorModel::Sinc, &lobe).unwrap();
        assert!(curve.windows(2).all(|w| w[1].1 <= w[0].1));
        assert!(emission_pattern_curve(&g, ArrayFactorModel::Sinc, &[-0.1]).is_err());
    }

    #[test]
    fn half_maximum_width_tracks_inverse_length() {
        for l in [5.0, 10.0, 20.0] {
            let half = half_maximum_angle(ArrayFactorModel::Sinc, &geom(l, 1.0)).unwrap();
            let full_width = 2.0 * half;
            assert!((full_width * l - 1.0).abs() < 0.2, "L {l}: {full_width}");
        }
    }

    #[test]
    fn emission_time() {
        let t = collective_emission_time(&EmissionParams::new(1000, 6e6).unwrap());
        assert!((t - 1.0 / 6e9).abs() < 1e-20);
        assert!((t / 160e-12 - 1.0).abs() < 0.1);
        let single = collective_emission_time(&EmissionParams::new(1, 6e6).unwrap());
        assert_eq!(single, 1.0 / 6e6);
        let t2000 = collective_emission_time(&EmissionParams::new(2000, 6e6).unwrap());
        assert!((t2000 * 1e12 - 83.33).abs() < 0.01);
        assert!(EmissionParams::new(0, 1.0).is_err());
        assert!(EmissionParams::new(1, 0.0).is_err());
    }
}
