//! Link budget and retry statistics for heralded remote entanglement.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{check_positive, check_range, Error, Result};

/// Ideal probability that a two-photon event heralds a Bell pair.
pub const HERALD_PROBABILITY: f64 = 0.25;

/// How fiber loss is assigned to each of the two photons.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum PropagationConvention {
    /// Each photon is attenuated over the full node separation.
    #[default]
    FullSeparation,
    /// The heralding station sits at the midpoint; each photon covers half.
    Midpoint,
}

impl PropagationConvention {
    pub fn name(self) -> &'static str {
        match self {
            PropagationConvention::FullSeparation => "full_separation",
            PropagationConvention::Midpoint => "midpoint",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "full_separation" => Some(PropagationConvention::FullSeparation),
            "midpoint" => Some(PropagationConvention::Midpoint),
            _ => None,
        }
    }
}

/// Per-photon transmission `10^(-alpha d / 10)` over the distance implied by
/// the convention.
pub fn propagation_efficiency(
    distance_km: f64,
    alpha_db_per_km: f64,
    convention: PropagationConvention,
) -> f64 {
    let path = match convention {
        PropagationConvention::FullSeparation => distance_km,
        PropagationConvention::Midpoint => distance_km / 2.0,
    };
    10f64.powf(-alpha_db_per_km * path / 10.0)
}

/// `(1/4) eta_node^2 eta_prop^2 eta_det^2`.
pub fn success_probability_from(eta_node: f64, eta_prop: f64, eta_det: f64) -> f64 {
    HERALD_PROBABILITY * (eta_node * eta_prop * eta_det).powi(2)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LinkParams {
    pub eta_node: f64,
    pub eta_det: f64,
    pub alpha_db_per_km: f64,
    pub distance_km: f64,
    /// Seconds per attempt.
    pub t_cycle: f64,
    pub t2_memory: f64,
    pub t_regen: f64,
    pub convention: PropagationConvention,
}

impl LinkParams {
    /// eta_node = 0.19, eta_det = 0.8, 0.2 dB/km over 20 km, 1 us cycle,
    /// 100 us memory, 1 us regeneration.
    pub fn operating_point() -> Self {
        Self {
            eta_node: 0.19,
            eta_det: 0.8,
            alpha_db_per_km: 0.2,
            distance_km: 20.0,
            t_cycle: 1e-6,
            t2_memory: 100e-6,
            t_regen: 1e-6,
            convention: PropagationConvention::FullSeparation,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_range("eta_node", self.eta_node, 0.0, 1.0)?;
        check_range("eta_det", self.eta_det, 0.0, 1.0)?;
        check_range("alpha_db_per_km", self.alpha_db_per_km, 0.0, f64::INFINITY)?;
        check_range("distance_km", self.distance_km, 0.0, f64::INFINITY)?;
        check_positive("t_cycle", self.t_cycle)?;
        check_positive("t2_memory", self.t2_memory)?;
        check_positive("t_regen", self.t_regen)?;
        Ok(())
    }

    pub fn eta_prop(&self) -> f64 {
        propagation_efficiency(self.distance_km, self.alpha_db_per_km, self.convention)
    }

    pub fn at_distance(mut self, distance_km: f64) -> Self {
        self.distance_km = distance_km;
        self
    }

    pub fn with_eta_node(mut self, eta_node: f64) -> Self {
        self.eta_node = eta_node;
        self
    }
}

pub fn success_probability(params: &LinkParams) -> Result<f64> {
    params.validate()?;
    Ok(success_probability_from(
        params.eta_node,
        params.eta_prop(),
        params.eta_det,
    ))
}

/// `1 - (1 - p)^M` for `M = 1..=max_attempts`.
pub fn cumulative_success(p_e: f64, max_attempts: u32) -> Result<Vec<(u32, f64)>> {
    check_range("p_e", p_e, 0.0, 1.0)?;
    if max_attempts < 1 {
        return Err(Error::param("max_attempts", "must be >= 1"));
    }
    let log_fail = (-p_e).ln_1p();
    Ok((1..=max_attempts)
        .map(|m| (m, -(m as f64 * log_fail).exp_m1()))
        .collect())
}

/// `P_E / T_cycle` in Hz.
pub fn entanglement_rate(params: &LinkParams) -> Result<f64> {
    Ok(success_probability(params)? / params.t_cycle)
}

/// Attempts that fit inside the memory coherence time.
pub fn attempts_within_memory(params: &LinkParams) -> Result<u32> {
    check_positive("t_regen", params.t_regen)?;
    check_positive("t2_memory", params.t2_memory)?;
    // guard against 100e-6 / 1e-6 = 99.99999999999999
    let ratio = params.t2_memory / params.t_regen;
    let attempts = (ratio * (1.0 + 4.0 * f64::EPSILON)).floor();
    Ok(attempts.min(u32::MAX as f64) as u32)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LinkStats {
    pub p_e: f64,
    pub rate_hz: f64,
    pub max_attempts: u32,
    pub cumulative: Vec<(u32, f64)>,
    /// Fraction of trials that succeeded within the memory budget.
    pub mc_success_fraction: f64,
    pub mc_std_error: f64,
    /// Mean attempts consumed per trial; failed trials count the full budget.
    pub mc_mean_attempts: f64,
    pub trials: u64,
}

impl LinkStats {
    /// Closed-form success probability within the memory budget.
    pub fn expected_success(&self) -> f64 {
        self.cumulative.last().map_or(0.0, |&(_, p)| p)
    }
}

/// Attempts used by one trial, and whether it succeeded. Each trial draws
/// from its own ChaCha stream keyed by `(seed, trial)`, so results do not
/// depend on how trials are scheduled across threads.
fn run_trial(p_e: f64, max_attempts: u32, seed: u64, trial: u64) -> (bool, u32) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    for attempt in 1..=max_attempts {
        if rng.random_bool(p_e) {
            return (true, attempt);
        }
    }
    (false, max_attempts)
}

/// Empirical outcome of repeated retry trials.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RetryStats {
    pub success_fraction: f64,
    /// Binomial standard error of `success_fraction`.
    pub std_error: f64,
    /// Mean attempts consumed per trial; failed trials count the full budget.
    pub mean_attempts: f64,
}

/// Monte Carlo of independent Bernoulli attempts with success probability
/// `p_e`, stopping at the first success or after `max_attempts`.
pub fn simulate_retries(p_e: f64, max_attempts: u32, trials: u64, seed: u64) -> Result<RetryStats> {
    check_range("p_e", p_e, 0.0, 1.0)?;
    if trials < 1 {
        return Err(Error::param("trials", "must be >= 1"));
    }
    let (successes, attempts) = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let (ok, used) = run_trial(p_e, max_attempts, seed, trial);
            (u64::from(ok), u64::from(used))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    let n = trials as f64;
    let fraction = successes as f64 / n;
    Ok(RetryStats {
        success_fraction: fraction,
        std_error: (fraction * (1.0 - fraction) / n).sqrt(),
        mean_attempts: attempts as f64 / n,
    })
}

/// Closed-form link figures plus a Monte Carlo of the retry protocol within
/// the memory budget.
pub fn simulate_link(params: &LinkParams, trials: u64, seed: u64) -> Result<LinkStats> {
    let p_e = success_probability(params)?;
    let max_attempts = attempts_within_memory(params)?;
    let mc = simulate_retries(p_e, max_attempts, trials, seed)?;
    let cumulative = if max_attempts >= 1 {
        cumulative_success(p_e, max_attempts)?
    } else {
        Vec::new()
    };
    Ok(LinkStats {
        p_e,
        rate_hz: p_e / params.t_cycle,
        max_attempts,
        cumulative,
        mc_success_fraction: mc.success_fraction,
        mc_std_error: mc.std_error,
        mc_mean_attempts: mc.mean_attempts,
        trials,
    })
}
