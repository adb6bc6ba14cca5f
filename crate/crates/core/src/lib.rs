//! Simulation of a two-node quantum link built from Rydberg-blockaded atomic
//! ensembles: gate dynamics, collective emission, atom-photon mapping,
//! two-photon interference and heralding, and link-level rates.
//!
//! Units are SI unless noted; Hamiltonians use `hbar = 1`, so frequencies
//! are angular (rad/s). Cloud dimensions are in units of the wavelength.

pub mod acceptance;
pub mod blockade;
pub mod emission;
pub mod error;
pub mod interface;
pub mod interference;
pub mod link;
pub mod oracle;
pub mod quantum;

pub use error::{Error, Result};
