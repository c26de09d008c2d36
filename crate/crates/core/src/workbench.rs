//! Batch front-end shared by the `fpw` binary and its tests.
//!
//! Every command returns a [`RunResult`] holding the printed summary lines,
//! non-fatal warnings and any files written. Exit codes: 0 success,
//! 1 numerical failure or output error, 2 usage or configuration error.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::com::{
    find_resonance, format_sci as sci, fpw_device_response, s21_sweep, write_csv,
    FpwResponseOptions, FrequencyResponse, SweepPlan,
};
use crate::config::{
    parse_calibration_points, parse_liquid_library, DeviceConfig, STANDARD_LIQUIDS,
};
use crate::dispersion::{
    loaded_velocity, sensitivities, DispersionWarning, LiquidLoad, LoadingState,
};
use crate::error::FpwError;
use crate::sensing::{
    fit_density_sensitivity, invert_density_calibrated, predict_frequency, reference,
    viscosity_coupling_report, LiquidSample, DEFAULT_COUPLING_THRESHOLD,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NUMERICAL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error(transparent)]
    Model(#[from] FpwError),

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Write {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    InFile { path: PathBuf, source: FpwError },

    #[error("unknown liquid '{name}'; available: {}", available.join(", "))]
    UnknownLiquid {
        name: String,
        available: Vec<String>,
    },
}

impl WorkbenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Model(e) | Self::InFile { source: e, .. } => match e {
                FpwError::NotConverged { .. } | FpwError::NoResonance(_) => EXIT_NUMERICAL,
                FpwError::InvalidInput(_)
                | FpwError::NoSolution(_)
                | FpwError::DegenerateFit(_)
                | FpwError::Parse { .. } => EXIT_USAGE,
            },
            Self::Read { .. } | Self::UnknownLiquid { .. } => EXIT_USAGE,
            Self::Write { .. } => EXIT_NUMERICAL,
        }
    }
}

type Result<T> = std::result::Result<T, WorkbenchError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum S21Mode {
    /// Free velocity from the `[com]` section.
    Bulk,
    /// Flexural-wave velocity of the (optionally loaded) plate.
    Fpw,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensitySweep {
    pub out: PathBuf,
    /// kg/m^3
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    Plate,
    Dispersion {
        liquid: Option<String>,
        tension: f64,
        sweep: Option<DensitySweep>,
    },
    S21 {
        mode: S21Mode,
        out: PathBuf,
        points: usize,
        liquid: Option<String>,
        viscous_attenuation: bool,
    },
    Fit {
        points_file: PathBuf,
    },
    Invert {
        points_file: PathBuf,
        frequency: f64,
    },
    Coupling {
        liquid: String,
        threshold: f64,
    },
    Reference,
    Liquids,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Plate => "plate",
            Self::Dispersion { .. } => "dispersion",
            Self::S21 { .. } => "s21",
            Self::Fit { .. } => "fit",
            Self::Invert { .. } => "invert",
            Self::Coupling { .. } => "coupling",
            Self::Reference => "reference",
            Self::Liquids => "liquids",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunResult {
    pub command: String,
    pub lines: Vec<String>,
    pub warnings: Vec<String>,
    pub outputs: Vec<PathBuf>,
    pub exit_status: i32,
}

impl RunResult {
    fn line(&mut self, text: impl Into<String>) {
        self.lines.push(text.into());
    }

    fn value(&mut self, key: &str, value: f64, unit: &str) {
        let unit = if unit.is_empty() {
            String::new()
        } else {
            format!(" {unit}")
        };
        self.lines.push(format!("{key} = {}{unit}", sci(value)));
    }
}

pub struct Workbench {
    pub config: DeviceConfig,
    pub liquids: Vec<LiquidSample>,
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| WorkbenchError::Read {
        path: path.to_path_buf(),
        source,
    })
}

fn in_file<T>(path: &Path, r: crate::Result<T>) -> Result<T> {
    r.map_err(|source| WorkbenchError::InFile {
        path: path.to_path_buf(),
        source,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| WorkbenchError::Write {
            path: path.to_path_buf(),
            source,
        })
}

impl Workbench {
    /// Loads the device config and liquid library, falling back to the
    /// bundled ones.
    pub fn load(config: Option<&Path>, liquids: Option<&Path>) -> Result<Self> {
        let config = match config {
            Some(p) => in_file(p, crate::config::parse_device_config(&read(p)?))?,
            None => DeviceConfig::paper_device(),
        };
        let liquids = match liquids {
            Some(p) => in_file(p, parse_liquid_library(&read(p)?))?,
            None => parse_liquid_library(STANDARD_LIQUIDS)?,
        };
        Ok(Self { config, liquids })
    }

    pub fn liquid(&self, name: &str) -> Result<&LiquidSample> {
        self.liquids
            .iter()
            .find(|l| l.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| WorkbenchError::UnknownLiquid {
                name: name.to_string(),
                available: self.liquids.iter().map(|l| l.name.clone()).collect(),
            })
    }

    pub fn run(&self, command: &Command) -> Result<RunResult> {
        let mut out = RunResult {
            command: command.name().to_string(),
            ..RunResult::default()
        };
        match command {
            Command::Plate => self.plate(&mut out)?,
            Command::Dispersion {
                liquid,
                tension,
                sweep,
            } => self.dispersion(liquid.as_deref(), *tension, sweep.as_ref(), &mut out)?,
            Command::S21 {
                mode,
                out: path,
                points,
                liquid,
                viscous_attenuation,
            } => self.s21(
                *mode,
                path,
                *points,
                liquid.as_deref(),
                *viscous_attenuation,
                &mut out,
            )?,
            Command::Fit { points_file } => self.fit(points_file, &mut out)?,
            Command::Invert {
                points_file,
                frequency,
            } => self.invert(points_file, *frequency, &mut out)?,
            Command::Coupling { liquid, threshold } => {
                self.coupling(liquid, *threshold, &mut out)?
            }
            Command::Reference => self.reference(&mut out)?,
            Command::Liquids => {
                out.line("# name density_kg_m3 viscosity_pa_s");
                for l in &self.liquids {
                    out.line(format!("{} {} {}", l.name, l.density, l.viscosity));
                }
            }
        }
        Ok(out)
    }

    fn loading(&self, liquid: Option<&str>, tension: f64) -> Result<LoadingState> {
        let liquid = liquid.map(|name| self.liquid(name)).transpose()?;
        Ok(LoadingState {
            tension,
            liquid: liquid.map(LiquidSample::load).transpose()?,
        })
    }

    fn plate(&self, out: &mut RunResult) -> Result<()> {
        let plate = self.config.plate()?;
        let lambda = self.config.geometry.wavelength;
        let computed = plate.computed();
        for layer in plate.layers() {
            out.line(format!(
                "layer {} h={} E={} nu={} rho={}",
                layer.name,
                sci(layer.thickness),
                sci(layer.young_modulus),
                sci(layer.poisson_ratio),
                sci(layer.density)
            ));
        }
        out.value("thickness", plate.thickness(), "m");
        out.value("E", plate.young_modulus(), "N/m^2");
        out.value("nu", plate.poisson_ratio(), "");
        out.value("E_prime", plate.plate_modulus(), "N/m^2");
        out.value("M_computed", computed.mass_per_area, "kg/m^2");
        if let Some(m) = plate.overrides().mass_per_area {
            out.value("M_override", m, "kg/m^2");
        }
        out.value("flexural_rigidity", plate.flexural_rigidity(), "N*m");
        let computed_b =
            crate::plate::bending_term(plate.plate_modulus(), plate.thickness(), lambda)?;
        out.value("B_computed", computed_b, "N/m");
        if let Some(b) = plate.overrides().bending_term {
            out.value("B_override", b, "N/m");
        }
        out.value("wavelength", lambda, "m");
        Ok(())
    }

    fn dispersion(
        &self,
        liquid: Option<&str>,
        tension: f64,
        sweep: Option<&DensitySweep>,
        out: &mut RunResult,
    ) -> Result<()> {
        let plate = self.config.plate()?;
        let lambda = self.config.geometry.wavelength;
        let loading = self.loading(liquid, tension)?;
        let sol = loaded_velocity(&plate, &loading, lambda)?;
        let sens = sensitivities(&plate, &loading, lambda)?;

        out.line(format!("liquid = {}", liquid.unwrap_or("none")));
        out.value("tension", tension, "N/m");
        out.value("phase_velocity", sol.phase_velocity, "m/s");
        out.value("frequency", sol.resonant_frequency, "Hz");
        out.value("evanescent_length", sol.evanescent_length, "m");
        out.value("viscous_length", sol.viscous_length, "m");
        out.value("viscous_mass", sol.viscous_mass, "kg/m^2");
        out.value("s_m", sens.mass, "m^3/kg");
        out.value("s_T", sens.tension, "m/N");
        out.line(format!("iterations = {}", sol.iterations));
        if let Some(ratio) = sol.sound_speed_ratio {
            out.value("velocity_over_water_sound_speed", ratio, "");
        }
        for w in &sol.warnings {
            out.warnings.push(match w {
                DispersionWarning::ShallowLiquid => {
                    "liquid does not cover the evanescent decay length".to_string()
                }
                DispersionWarning::FastWave { velocity_ratio } => {
                    format!("plate wave is not slow against the liquid (v/c = {velocity_ratio:.3})")
                }
            });
        }

        if let Some(sweep) = sweep {
            if sweep.points < 2 || !(sweep.min > 0.0 && sweep.max > sweep.min) {
                return Err(FpwError::InvalidInput(
                    "density sweep needs min > 0, max > min, points >= 2".into(),
                )
                .into());
            }
            let viscosity = loading.liquid.map_or(0.0, |l| l.viscosity);
            let mut file = create(&sweep.out)?;
            let write_err = |source| WorkbenchError::Write {
                path: sweep.out.clone(),
                source,
            };
            writeln!(file, "density_kg_m3,velocity_m_s,frequency_hz").map_err(write_err)?;
            for k in 0..sweep.points {
                let density =
                    sweep.min + (sweep.max - sweep.min) * k as f64 / (sweep.points - 1) as f64;
                let state = LoadingState {
                    tension,
                    liquid: Some(LiquidLoad::new(density, viscosity)?),
                };
                let s = loaded_velocity(&plate, &state, lambda)?;
                writeln!(
                    file,
                    "{},{},{}",
                    sci(density),
                    sci(s.phase_velocity),
                    sci(s.resonant_frequency)
                )
                .map_err(write_err)?;
            }
            file.flush().map_err(write_err)?;
            out.outputs.push(sweep.out.clone());
        }
        Ok(())
    }

    fn s21(
        &self,
        mode: S21Mode,
        path: &Path,
        points: usize,
        liquid: Option<&str>,
        viscous_attenuation: bool,
        out: &mut RunResult,
    ) -> Result<()> {
        let geometry = &self.config.geometry;
        let response: FrequencyResponse = match mode {
            S21Mode::Bulk => {
                if liquid.is_some() {
                    out.warnings
                        .push("--liquid is ignored for the bulk sweep".into());
                }
                let f0 = self.config.com.free_velocity / geometry.wavelength;
                s21_sweep(geometry, &self.config.com, &SweepPlan::around(f0, points))?
            }
            S21Mode::Fpw => {
                let plate = self.config.plate()?;
                let loading = self.loading(liquid, 0.0)?;
                let options = FpwResponseOptions {
                    points,
                    viscous_attenuation,
                };
                fpw_device_response(&plate, &loading, geometry, &self.config.com, &options)?
            }
        };
        let mut file = create(path)?;
        write_csv(&response, &mut file)
            .and_then(|_| file.flush())
            .map_err(|source| WorkbenchError::Write {
                path: path.to_path_buf(),
                source,
            })?;
        out.outputs.push(path.to_path_buf());
        out.line(format!("points = {}", response.points.len()));
        if response.gaps() > 0 {
            out.warnings.push(format!(
                "{} singular frequencies written as nan",
                response.gaps()
            ));
        }
        let summary = find_resonance(&response)?;
        out.value("peak_frequency", summary.peak_frequency, "Hz");
        out.value("insertion_loss", summary.insertion_loss, "dB");
        out.value("bandwidth_3db", summary.bandwidth_3db, "Hz");
        out.value("quality_factor", summary.quality_factor, "");
        Ok(())
    }

    fn fit(&self, points_file: &Path, out: &mut RunResult) -> Result<()> {
        let points = in_file(points_file, parse_calibration_points(&read(points_file)?))?;
        let fit = fit_density_sensitivity(&points)?;
        out.line(format!("points = {}", points.len()));
        out.value("slope", fit.slope, "Hz/(kg/m^3)");
        out.value(
            "slope_mhz_per_g_cm3",
            fit.slope_mhz_per_g_cm3(),
            "MHz/(g/cm^3)",
        );
        out.value("intercept", fit.intercept, "Hz");
        out.value("r_squared", fit.r_squared, "");
        Ok(())
    }

    fn invert(&self, points_file: &Path, frequency: f64, out: &mut RunResult) -> Result<()> {
        let points = in_file(points_file, parse_calibration_points(&read(points_file)?))?;
        let fit = fit_density_sensitivity(&points)?;
        let estimate = invert_density_calibrated(frequency, &fit)?;
        out.value("frequency", frequency, "Hz");
        out.value("density", estimate.density, "kg/m^3");
        out.value("density_g_cm3", estimate.density / 1e3, "g/cm^3");
        if estimate.out_of_range {
            let (lo, hi) = fit.density_range();
            out.warnings.push(format!(
                "density {:.1} kg/m^3 lies outside the calibrated range {lo:.1}..{hi:.1}",
                estimate.density
            ));
        }
        Ok(())
    }

    fn coupling(&self, liquid: &str, threshold: f64, out: &mut RunResult) -> Result<()> {
        let plate = self.config.plate()?;
        let sample = self.liquid(liquid)?;
        let report =
            viscosity_coupling_report(sample, &plate, self.config.geometry.wavelength, threshold)?;
        out.line(format!("liquid = {}", report.liquid));
        out.value("frequency", report.frequency, "Hz");
        out.value("viscous_mass", report.viscous_mass, "kg/m^2");
        out.value("entrained_mass", report.entrained_mass, "kg/m^2");
        out.value("ratio", report.ratio, "");
        out.value("viscous_fraction", report.viscous_fraction, "");
        out.value("threshold", report.threshold, "");
        out.line(format!("verdict = {}", report.verdict));
        Ok(())
    }

    fn reference(&self, out: &mut RunResult) -> Result<()> {
        let plate = self.config.plate()?;
        let lambda = self.config.geometry.wavelength;
        let data = reference::load_reference_datasets();
        let model_mhz = |name: &str| -> Result<f64> {
            Ok(predict_frequency(&plate, lambda, Some(self.liquid(name)?))? / 1e6)
        };
        out.line("# low-viscosity liquids: published estimate vs model (MHz)");
        out.line("liquid,density_g_cm3,published_mhz,model_mhz");
        for p in data.low_viscosity {
            out.line(format!(
                "{},{},{},{:.4}",
                p.liquid,
                p.density,
                p.frequency_mhz,
                model_mhz(p.liquid)?
            ));
        }
        out.line("# viscosity comparison (MHz, dB)");
        out.line("liquid,published_theory_mhz,measured_mhz,measured_il_db,model_mhz");
        for p in data.viscosity_comparison {
            out.line(format!(
                "{},{},{},{},{:.4}",
                p.liquid,
                p.theoretical_mhz,
                p.experimental_mhz,
                p.insertion_loss_db,
                model_mhz(p.liquid)?
            ));
        }
        out.line(format!(
            "unloaded: measured {} MHz, published estimate {} MHz, model {:.4} MHz",
            data.unloaded_measured_mhz,
            reference::UNLOADED_ESTIMATED_MHZ,
            predict_frequency(&plate, lambda, None)? / 1e6
        ));
        Ok(())
    }
}

/// Default coupling threshold re-exported for the CLI.
pub const COUPLING_THRESHOLD: f64 = DEFAULT_COUPLING_THRESHOLD;
