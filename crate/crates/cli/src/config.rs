//! Run configuration: built-in defaults, then an optional TOML file, then
//! command-line overrides.

use std::f64::consts::PI;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rydnet::blockade::BlockadeParams;
use rydnet::emission::{ArrayFactorModel, CloudGeometry, FiberAcceptance};
use rydnet::interference::VisibilityModel;
use rydnet::link::{LinkParams, PropagationConvention};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BlockadeConfig {
    #[serde(alias = "N")]
    pub n_atoms: u64,
    /// Single-atom Rabi frequency `Omega / 2 pi`, MHz.
    pub omega_mhz: f64,
    /// `V / Omega_eff`.
    pub blockade_ratio: f64,
}

impl Default for BlockadeConfig {
    fn default() -> Self {
        Self {
            n_atoms: 1000,
            omega_mhz: 10.0,
            blockade_ratio: 15.8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryConfig {
    /// Cloud length in wavelengths.
    #[serde(alias = "L")]
    pub length: f64,
    /// Cloud radius in wavelengths.
    #[serde(alias = "R")]
    pub radius: f64,
    pub theta_max_deg: f64,
    /// `sinc` or `sinc_transverse`.
    pub model: String,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            length: 10.0,
            radius: 1.0,
            theta_max_deg: 6.0,
            model: ArrayFactorModel::default().name().to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InterfaceConfig {
    pub f_gate: f64,
    pub eta_dir: f64,
    pub eta_map: f64,
    #[serde(alias = "eta_r")]
    pub eta_retrieval: f64,
}

impl Default for InterfaceConfig {
    fn default() -> Self {
        Self {
            f_gate: 0.99,
            eta_dir: 0.35,
            eta_map: 0.55,
            eta_retrieval: 0.55,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LinkConfig {
    pub eta_det: f64,
    /// Fiber attenuation, dB/km.
    pub alpha_db_km: f64,
    pub distance_km: f64,
    /// Seconds.
    pub t_cycle: f64,
    /// Memory coherence time, seconds.
    pub t2: f64,
    /// Regeneration time per attempt, seconds.
    pub t_regen: f64,
    pub visibility: f64,
    /// `full_separation` or `midpoint`.
    pub convention: String,
    pub trials: u64,
}

impl Default for LinkConfig {
    fn default() -> Self {
        Self {
            eta_det: 0.8,
            alpha_db_km: 0.2,
            distance_km: 20.0,
            t_cycle: 1e-6,
            t2: 100e-6,
            t_regen: 1e-6,
            visibility: 0.95,
            convention: PropagationConvention::default().name().to_string(),
            trials: 100_000,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub output_dir: PathBuf,
    pub blockade: BlockadeConfig,
    pub geometry: GeometryConfig,
    pub interface: InterfaceConfig,
    pub link: LinkConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: rydnet::acceptance::DEFAULT_SEED,
            output_dir: PathBuf::from("out"),
            blockade: BlockadeConfig::default(),
            geometry: GeometryConfig::default(),
            interface: InterfaceConfig::default(),
            link: LinkConfig::default(),
        }
    }
}

/// Values given on the command line; `None` leaves the config untouched.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
    pub n_atoms: Option<u64>,
    pub blockade_ratio: Option<f64>,
    pub cloud_length: Option<f64>,
    pub cloud_radius: Option<f64>,
    pub theta_max_deg: Option<f64>,
    pub distance_km: Option<f64>,
    pub alpha_db_km: Option<f64>,
    pub eta_det: Option<f64>,
    pub visibility: Option<f64>,
    pub trials: Option<u64>,
}

impl RunConfig {
    pub fn from_toml_str(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Parse(e.message().to_string()))
    }

    pub fn from_file(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            io::ErrorKind::NotFound => CliError::MissingConfig(path.to_path_buf()),
            _ => CliError::Io(format!("{}: {e}", path.display())),
        })?;
        Self::from_toml_str(&text)
    }

    pub fn apply(&mut self, o: &Overrides) {
        fn set<T: Clone>(slot: &mut T, value: &Option<T>) {
            if let Some(v) = value {
                *slot = v.clone();
            }
        }
        set(&mut self.seed, &o.seed);
        set(&mut self.output_dir, &o.output_dir);
        set(&mut self.blockade.n_atoms, &o.n_atoms);
        set(&mut self.blockade.blockade_ratio, &o.blockade_ratio);
        set(&mut self.geometry.length, &o.cloud_length);
        set(&mut self.geometry.radius, &o.cloud_radius);
        set(&mut self.geometry.theta_max_deg, &o.theta_max_deg);
        set(&mut self.link.distance_km, &o.distance_km);
        set(&mut self.link.alpha_db_km, &o.alpha_db_km);
        set(&mut self.link.eta_det, &o.eta_det);
        set(&mut self.link.visibility, &o.visibility);
        set(&mut self.link.trials, &o.trials);
    }

    /// Defaults, then `path` if given, then `overrides`; the result is
    /// validated.
    pub fn load(path: Option<&Path>, overrides: &Overrides) -> Result<Self, CliError> {
        let mut config = match path {
            Some(p) => Self::from_file(p)?,
            None => Self::default(),
        };
        config.apply(overrides);
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.blockade_params()?;
        self.geometry()?;
        self.acceptance()?;
        self.model()?;
        self.link_params()?.validate()?;
        VisibilityModel::new(self.link.visibility)?;
        rydnet::interface::node_efficiency(
            self.interface.f_gate,
            self.interface.eta_dir,
            self.interface.eta_map,
        )?
        .with_memory(self.interface.eta_retrieval, self.link.t2)?;
        if self.link.trials == 0 {
            return Err(CliError::Validation("link.trials must be >= 1".into()));
        }
        Ok(())
    }

    pub fn omega(&self) -> f64 {
        2.0 * PI * self.blockade.omega_mhz * 1e6
    }

    pub fn blockade_params(&self) -> Result<BlockadeParams, CliError> {
        Ok(BlockadeParams::with_blockade_ratio(
            self.blockade.n_atoms,
            self.omega(),
            self.blockade.blockade_ratio,
        )?)
    }

    pub fn geometry(&self) -> Result<CloudGeometry, CliError> {
        Ok(CloudGeometry::new(
            self.geometry.length,
            self.geometry.radius,
        )?)
    }

    pub fn acceptance(&self) -> Result<FiberAcceptance, CliError> {
        Ok(FiberAcceptance::from_degrees(self.geometry.theta_max_deg)?)
    }

    pub fn model(&self) -> Result<ArrayFactorModel, CliError> {
        ArrayFactorModel::from_name(&self.geometry.model).ok_or_else(|| {
            CliError::Validation(format!("unknown geometry.model {:?}", self.geometry.model))
        })
    }

    /// Link parameters with `eta_node` taken from the interface section.
    pub fn link_params(&self) -> Result<LinkParams, CliError> {
        let convention =
            PropagationConvention::from_name(&self.link.convention).ok_or_else(|| {
                CliError::Validation(format!(
                    "unknown link.convention {:?}",
                    self.link.convention
                ))
            })?;
        Ok(LinkParams {
            eta_node: self.interface.f_gate * self.interface.eta_dir * self.interface.eta_map,
            eta_det: self.link.eta_det,
            alpha_db_per_km: self.link.alpha_db_km,
            distance_km: self.link.distance_km,
            t_cycle: self.link.t_cycle,
            t2_memory: self.link.t2,
            t_regen: self.link.t_regen,
            convention,
        })
    }
}
