//! One function per subcommand. Each writes its CSV files into the output
//! directory and returns the paths written.

use std::fs;
use std::path::{Path, PathBuf};

use rydnet::acceptance;
use rydnet::blockade;
use rydnet::emission::{self, CloudGeometry};
use rydnet::interface::{self, build_psi2};
use rydnet::interference::{self, beamsplitter, joint_state, VisibilityModel};
use rydnet::link;

use crate::config::RunConfig;
use crate::error::CliError;

pub const TRAJECTORY_SAMPLES: usize = 200;
pub const PATTERN_LENGTHS: [f64; 3] = [1.0, 5.0, 10.0];
pub const EFFICIENCY_RADII: [f64; 3] = [0.5, 1.0, 2.0];
pub const QUADRATURE_POINTS: usize = 400;
pub const CUMULATIVE_P_E: [f64; 4] = [0.002, 0.005, 0.01, 0.02];
pub const MAX_ATTEMPTS_CURVE: u32 = 500;
pub const RATE_ETA_NODE: [f64; 3] = [0.15, 0.19, 0.25];
pub const MAX_DISTANCE_KM: u32 = 100;

/// Floats use the shortest representation that round-trips.
fn num(x: f64) -> String {
    format!("{x}")
}

struct Table {
    path: PathBuf,
    writer: csv::Writer<fs::File>,
}

impl Table {
    fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self, CliError> {
        let path = dir.join(name);
        let mut writer = csv::Writer::from_path(&path)?;
        writer.write_record(header)?;
        Ok(Self { path, writer })
    }

    fn row<I, S>(&mut self, fields: I) -> Result<(), CliError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        self.writer.write_record(fields)?;
        Ok(())
    }

    fn finish(mut self) -> Result<PathBuf, CliError> {
        self.writer.flush()?;
        Ok(self.path)
    }
}

fn key_value(dir: &Path, name: &str, rows: &[(&str, String)]) -> Result<PathBuf, CliError> {
    let mut t = Table::create(dir, name, &["key", "value"])?;
    for (k, v) in rows {
        t.row([*k, v.as_str()])?;
    }
    t.finish()
}

fn output_dir(config: &RunConfig) -> Result<&Path, CliError> {
    let dir = config.output_dir.as_path();
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    Ok(dir)
}

pub fn step1(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let dir = output_dir(config)?;
    let params = config.blockade_params()?;
    let result = blockade::run_step1(&params, TRAJECTORY_SAMPLES)?;

    let mut t = Table::create(
        dir,
        "step1_trajectory.csv",
        &["time_s", "pop_gcGe", "pop_rcGe", "pop_gcW", "pop_rcW"],
    )?;
    for (time, pops) in result
        .trajectory
        .times
        .iter()
        .zip(&result.trajectory.populations)
    {
        t.row(std::iter::once(num(*time)).chain(pops.iter().map(|&p| num(p))))?;
    }
    let trajectory = t.finish()?;

    let final_leakage = result.final_state.populations()[blockade::RC_W];
    let summary = key_value(
        dir,
        "step1_summary.csv",
        &[
            ("n_atoms", params.n_atoms().to_string()),
            (
                "omega_over_2pi_hz",
                num(params.omega() / (2.0 * std::f64::consts::PI)),
            ),
            (
                "omega_eff_over_2pi_hz",
                num(params.effective_rabi() / (2.0 * std::f64::consts::PI)),
            ),
            ("blockade_ratio", num(params.blockade_ratio())),
            ("t_control_s", num(params.control_pulse_duration())),
            ("t_pi_ensemble_s", num(params.ensemble_pulse_duration())),
            ("bell_fidelity", num(result.bell_fidelity)),
            ("max_leakage", num(result.max_leakage)),
            ("final_leakage", num(final_leakage)),
        ],
    )?;
    println!(
        "step1: bell_fidelity={:.6} max_leakage={:.3e}",
        result.bell_fidelity, result.max_leakage
    );
    Ok(vec![trajectory, summary])
}

fn with_configured(values: &[f64], extra: f64) -> Vec<f64> {
    let mut v = values.to_vec();
    if !v.contains(&extra) {
        v.push(extra);
        v.sort_by(f64::total_cmp);
    }
    v
}

pub fn emission(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let dir = output_dir(config)?;
    let model = config.model()?;
    let acceptance = config.acceptance()?;
    let radius = config.geometry.radius;

    let mut t = Table::create(
        dir,
        "emission_pattern.csv",
        &["L_over_lambda", "theta_deg", "intensity"],
    )?;
    let degrees: Vec<f64> = (0..=900).map(|k| k as f64 / 10.0).collect();
    let grid: Vec<f64> = degrees.iter().map(|d| d.to_radians()).collect();
    for l in with_configured(&PATTERN_LENGTHS, config.geometry.length) {
        let curve =
            emission::emission_pattern_curve(&CloudGeometry::new(l, radius)?, model, &grid)?;
        for (deg, (_, intensity)) in degrees.iter().zip(curve) {
            t.row([num(l), num(*deg), num(intensity)])?;
        }
    }
    let pattern = t.finish()?;

    let mut t = Table::create(
        dir,
        "directional_efficiency.csv",
        &["R_over_lambda", "L_over_lambda", "eta_dir"],
    )?;
    for r in with_configured(&EFFICIENCY_RADII, radius) {
        for k in 1..=40 {
            let l = k as f64 * 0.5;
            let eta = emission::directional_efficiency(
                &CloudGeometry::new(l, r)?,
                &acceptance,
                model,
                QUADRATURE_POINTS,
            )?;
            t.row([num(r), num(l), num(eta)])?;
        }
    }
    let efficiency = t.finish()?;

    let eta = emission::directional_efficiency(
        &config.geometry()?,
        &acceptance,
        model,
        QUADRATURE_POINTS,
    )?;
    println!(
        "emission: model={} L={} R={} theta_max={} deg eta_dir={:.4}",
        model.name(),
        config.geometry.length,
        radius,
        config.geometry.theta_max_deg,
        eta
    );
    Ok(vec![pattern, efficiency])
}

pub fn node(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let dir = output_dir(config)?;
    let i = &config.interface;
    let breakdown = interface::node_efficiency(i.f_gate, i.eta_dir, i.eta_map)?
        .with_memory(i.eta_retrieval, config.link.t2)?;
    let eta_geometry = emission::directional_efficiency(
        &config.geometry()?,
        &config.acceptance()?,
        config.model()?,
        QUADRATURE_POINTS,
    )?;
    let mut rows: Vec<(&str, String)> = breakdown
        .to_record()
        .into_iter()
        .map(|(k, v)| (k, num(v)))
        .collect();
    rows.push(("eta_dir_geometry", num(eta_geometry)));
    let path = key_value(dir, "node_efficiency.csv", &rows)?;
    println!("node: eta_node={:.6}", breakdown.eta_node);
    Ok(vec![path])
}

pub fn hom(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let dir = output_dir(config)?;
    let out = beamsplitter(&joint_state(&build_psi2(), &build_psi2())?)?;

    let mut header = vec!["pattern".to_string(), "probability".to_string()];
    for spins in ["pp", "pm", "mp", "mm"] {
        header.push(format!("amp_{spins}_re"));
        header.push(format!("amp_{spins}_im"));
    }
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::create(dir, "herald_outcomes.csv", &header)?;
    for outcome in interference::all_outcomes(&out)? {
        let mut row = vec![outcome.pattern.name().to_string(), num(outcome.probability)];
        match &outcome.atomic_state {
            Some(state) => {
                for a in state.amplitudes().iter() {
                    row.push(num(a.re));
                    row.push(num(a.im));
                }
            }
            None => row.extend(std::iter::repeat_n(String::new(), 8)),
        }
        t.row(row)?;
    }
    let outcomes = t.finish()?;

    let mut t = Table::create(
        dir,
        "fidelity_vs_visibility.csv",
        &["visibility", "fidelity"],
    )?;
    for v in with_configured(
        &(0..=100).map(|k| k as f64 / 100.0).collect::<Vec<_>>(),
        config.link.visibility,
    ) {
        let (f, _) = interference::heralded_fidelity(&VisibilityModel::new(v)?);
        t.row([num(v), num(f)])?;
    }
    let fidelity = t.finish()?;

    let (f, _) = interference::heralded_fidelity(&VisibilityModel::new(config.link.visibility)?);
    println!(
        "hom: p_herald={} fidelity(V={})={:.6}",
        interference::heralding_probability(&out)?,
        config.link.visibility,
        f
    );
    Ok(vec![outcomes, fidelity])
}

pub fn link(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let dir = output_dir(config)?;
    let params = config.link_params()?;

    let header: Vec<String> = std::iter::once("M".to_string())
        .chain(
            CUMULATIVE_P_E
                .iter()
                .map(|p| format!("p_cumulative_pe_{}pct", num(p * 100.0))),
        )
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::create(dir, "cumulative_success.csv", &header)?;
    let curves = CUMULATIVE_P_E
        .iter()
        .map(|&p| link::cumulative_success(p, MAX_ATTEMPTS_CURVE))
        .collect::<Result<Vec<_>, _>>()?;
    for m in 0..MAX_ATTEMPTS_CURVE as usize {
        t.row(std::iter::once((m + 1).to_string()).chain(curves.iter().map(|c| num(c[m].1))))?;
    }
    let cumulative = t.finish()?;

    let header: Vec<String> = std::iter::once("distance_km".to_string())
        .chain(
            RATE_ETA_NODE
                .iter()
                .map(|e| format!("rate_hz_eta_node_{}", num(*e))),
        )
        .collect();
    let header: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut t = Table::create(dir, "rate_vs_distance.csv", &header)?;
    for d in 0..=MAX_DISTANCE_KM {
        let d = d as f64;
        let mut row = vec![num(d)];
        for &eta in &RATE_ETA_NODE {
            row.push(num(link::entanglement_rate(
                &params.with_eta_node(eta).at_distance(d),
            )?));
        }
        t.row(row)?;
    }
    let rate = t.finish()?;

    let stats = link::simulate_link(&params, config.link.trials, config.seed)?;
    let summary = key_value(
        dir,
        "link_summary.csv",
        &[
            ("distance_km", num(params.distance_km)),
            ("convention", params.convention.name().to_string()),
            ("eta_node", num(params.eta_node)),
            ("eta_prop", num(params.eta_prop())),
            ("eta_det", num(params.eta_det)),
            ("p_e", num(stats.p_e)),
            ("rate_hz", num(stats.rate_hz)),
            ("max_attempts", stats.max_attempts.to_string()),
            ("p_success_within_memory", num(stats.expected_success())),
            ("mc_success_fraction", num(stats.mc_success_fraction)),
            ("mc_std_error", num(stats.mc_std_error)),
            ("mc_mean_attempts", num(stats.mc_mean_attempts)),
            ("trials", stats.trials.to_string()),
            ("seed", config.seed.to_string()),
        ],
    )?;
    println!(
        "link: d={} km p_e={:.4e} rate={:.1} Hz within-memory success={:.4} (mc {:.4})",
        params.distance_km,
        stats.p_e,
        stats.rate_hz,
        stats.expected_success(),
        stats.mc_success_fraction
    );
    Ok(vec![cumulative, rate, summary])
}

pub fn figures(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let mut written = step1(config)?;
    written.extend(emission(config)?);
    written.extend(node(config)?);
    written.extend(hom(config)?);
    written.extend(link(config)?);
    Ok(written)
}

/// Runs every acceptance criterion; fails if any does.
pub fn check(config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let results = acceptance::run_all(config.seed);
    for c in &results {
        println!("{c}");
    }
    let failed = results.iter().filter(|c| !c.passed).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed > 0 {
        return Err(CliError::Acceptance { failed });
    }
    Ok(Vec::new())
}
