//! Simulation and analysis of resonant flexural-plate-wave (FPW) liquid
//! density sensors.
//!
//! * [`plate`]: effective parameters of a layered membrane.
//! * [`dispersion`]: loaded A0 phase velocity, sensitivities, density inversion.
//! * [`com`]: coupling-of-modes two-port resonator response.
//! * [`sensing`]: calibration fits, viscosity coupling, reference data.
//! * [`config`] and [`workbench`]: file formats and the batch front-end.

pub mod com;
pub mod config;
pub mod dispersion;
pub mod error;
pub mod plate;
pub mod sensing;
pub mod workbench;

pub use error::{FpwError, Result};
