//! Command-line front end: figure data as CSV and the acceptance suite.

pub mod commands;
pub mod config;
pub mod error;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use config::{Overrides, RunConfig};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "rydnet",
    version,
    about = "Rydberg-ensemble quantum network simulator"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub options: Options,
}

#[derive(Debug, Subcommand, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Step-1 trajectory and Bell fidelity
    Step1,
    /// Emission pattern and directional efficiency curves
    Emission,
    /// Node efficiency breakdown
    Node,
    /// Herald outcome table and fidelity versus visibility
    Hom,
    /// Cumulative success, rate versus distance and retry Monte Carlo
    Link,
    /// All of the above
    Figures,
    /// Run the acceptance suite
    Check,
}

#[derive(Debug, Args, Clone, Default)]
pub struct Options {
    /// TOML config file
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true)]
    pub n_atoms: Option<u64>,
    /// V / Omega_eff
    #[arg(long, global = true)]
    pub blockade_ratio: Option<f64>,
    /// Cloud length in wavelengths
    #[arg(long, global = true)]
    pub cloud_length: Option<f64>,
    /// Cloud radius in wavelengths
    #[arg(long, global = true)]
    pub cloud_radius: Option<f64>,
    #[arg(long, global = true)]
    pub theta_max_deg: Option<f64>,
    #[arg(long, global = true)]
    pub distance_km: Option<f64>,
    #[arg(long, global = true)]
    pub alpha_db_km: Option<f64>,
    #[arg(long, global = true)]
    pub eta_det: Option<f64>,
    #[arg(long, global = true)]
    pub visibility: Option<f64>,
    /// Monte Carlo trials for the retry simulation
    #[arg(long, global = true)]
    pub trials: Option<u64>,
}

impl Options {
    pub fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            output_dir: self.out.clone(),
            n_atoms: self.n_atoms,
            blockade_ratio: self.blockade_ratio,
            cloud_length: self.cloud_length,
            cloud_radius: self.cloud_radius,
            theta_max_deg: self.theta_max_deg,
            distance_km: self.distance_km,
            alpha_db_km: self.alpha_db_km,
            eta_det: self.eta_det,
            visibility: self.visibility,
            trials: self.trials,
        }
    }
}

pub fn execute(command: Command, config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    match command {
        Command::Step1 => commands::step1(config),
        Command::Emission => commands::emission(config),
        Command::Node => commands::node(config),
        Command::Hom => commands::hom(config),
        Command::Link => commands::link(config),
        Command::Figures => commands::figures(config),
        Command::Check => commands::check(config),
    }
}

/// Parses arguments, runs the command and returns the process exit code.
/// Errors are reported on stderr as a JSON record.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return error::EXIT_OK;
        }
        Err(e) => {
            let err = CliError::Usage(e.kind().to_string());
            eprint!("{}", e.render());
            eprintln!("{}", err.record());
            return err.exit_code();
        }
    };
    let result = RunConfig::load(cli.options.config.as_deref(), &cli.options.overrides())
        .and_then(|config| execute(cli.command, &config));
    match result {
        Ok(paths) => {
            for p in paths {
                println!("wrote {}", p.display());
            }
            error::EXIT_OK
        }
        Err(e) => {
            eprintln!("{}", e.record());
            e.exit_code()
        }
    }
}
