//! Density calibration and the limits of frequency-only density sensing.
//!
//! Densities are kg/m^3 and frequencies Hz inside this module; the
//! `*_mhz_per_g_cm3` helpers convert at the reporting boundary.

use std::fmt;

use crate::dispersion::{loaded_velocity, LiquidLoad, LoadingState, VelocitySolution};
use crate::error::{invalid, FpwError, Result};
use crate::plate::CompositePlate;

/// Fraction of the added areal mass above which the viscous term is
/// considered inseparable from density.
pub const DEFAULT_COUPLING_THRESHOLD: f64 = 0.05;

/// A named test liquid.
#[derive(Debug, Clone, PartialEq)]
pub struct LiquidSample {
    pub name: String,
    /// kg/m^3
    pub density: f64,
    /// Pa*s
    pub viscosity: f64,
}

impl LiquidSample {
    pub fn new(name: impl Into<String>, density: f64, viscosity: f64) -> Result<Self> {
        let sample = Self {
            name: name.into(),
            density,
            viscosity,
        };
        sample.load()?;
        Ok(sample)
    }

    pub fn load(&self) -> Result<LiquidLoad> {
        LiquidLoad::new(self.density, self.viscosity)
            .map_err(|e| invalid(format!("liquid '{}': {e}", self.name)))
    }

    pub fn ipa() -> Self {
        Self::preset("ipa", 787.0, 0.0025)
    }

    pub fn water() -> Self {
        Self::preset("water", 1000.0, 0.001)
    }

    /// Viscosity quoted as approximately 0.0015 Pa*s; taken as exact.
    pub fn saline() -> Self {
        Self::preset("saline", 1200.0, 0.0015)
    }

    pub fn glycerol() -> Self {
        Self::preset("glycerol", 1200.0, 0.934)
    }

    fn preset(name: &str, density: f64, viscosity: f64) -> Self {
        Self {
            name: name.into(),
            density,
            viscosity,
        }
    }
}

/// IPA, water, saline and glycerol.
pub fn standard_liquids() -> Vec<LiquidSample> {
    vec![
        LiquidSample::ipa(),
        LiquidSample::water(),
        LiquidSample::saline(),
        LiquidSample::glycerol(),
    ]
}

/// One network-analyzer reading.
#[derive(Debug, Clone, PartialEq)]
pub struct Measurement {
    /// Hz
    pub frequency: f64,
    /// dB, non-positive
    pub insertion_loss: f64,
    pub liquid_name: String,
}

impl Measurement {
    pub fn new(
        liquid_name: impl Into<String>,
        frequency: f64,
        insertion_loss: f64,
    ) -> Result<Self> {
        if !(frequency.is_finite() && frequency > 0.0) {
            return Err(invalid("measured frequency must be > 0"));
        }
        if !(insertion_loss.is_finite() && insertion_loss <= 0.0) {
            return Err(invalid("insertion loss must be <= 0 dB"));
        }
        Ok(Self {
            frequency,
            insertion_loss,
            liquid_name: liquid_name.into(),
        })
    }
}

/// Least-squares line `f = slope * rho + intercept`.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationFit {
    /// Hz per kg/m^3
    pub slope: f64,
    /// Hz
    pub intercept: f64,
    pub r_squared: f64,
    /// `(density, frequency)` pairs the line was fitted to.
    pub points: Vec<(f64, f64)>,
}

impl CalibrationFit {
    pub fn frequency_at(&self, density: f64) -> f64 {
        self.slope * density + self.intercept
    }

    /// Slope in MHz per g/cm^3.
    pub fn slope_mhz_per_g_cm3(&self) -> f64 {
        self.slope * 1e3 / 1e6
    }

    pub fn density_range(&self) -> (f64, f64) {
        self.points
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &(d, _)| {
                (lo.min(d), hi.max(d))
            })
    }
}

/// Ordinary least squares of frequency on density.
pub fn fit_density_sensitivity(points: &[(f64, f64)]) -> Result<CalibrationFit> {
    if points.len() < 2 {
        return Err(FpwError::DegenerateFit("need at least two points".into()));
    }
    if points
        .iter()
        .any(|(d, f)| !(d.is_finite() && f.is_finite()))
    {
        return Err(invalid("calibration points must be finite"));
    }
    let n = points.len() as f64;
    let mean_d = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_f = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (sxx, sxy, syy) = points
        .iter()
        .fold((0.0, 0.0, 0.0), |(sxx, sxy, syy), &(d, f)| {
            let dx = d - mean_d;
            let dy = f - mean_f;
            (sxx + dx * dx, sxy + dx * dy, syy + dy * dy)
        });
    let spread = points
        .iter()
        .map(|p| (p.0 - mean_d).abs())
        .fold(0.0, f64::max);
    if sxx == 0.0 || spread <= 1e-12 * mean_d.abs() {
        return Err(FpwError::DegenerateFit(
            "all densities are identical".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_f - slope * mean_d;
    let residual: f64 = points
        .iter()
        .map(|&(d, f)| (f - (slope * d + intercept)).powi(2))
        .sum();
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (1.0 - residual / syy).clamp(0.0, 1.0)
    };
    Ok(CalibrationFit {
        slope,
        intercept,
        r_squared,
        points: points.to_vec(),
    })
}

/// Model resonant frequency of the plate with an optional liquid on it.
pub fn predict_frequency(
    plate: &CompositePlate,
    wavelength: f64,
    liquid: Option<&LiquidSample>,
) -> Result<f64> {
    Ok(predict(plate, wavelength, liquid)?.resonant_frequency)
}

fn predict(
    plate: &CompositePlate,
    wavelength: f64,
    liquid: Option<&LiquidSample>,
) -> Result<VelocitySolution> {
    let loading = match liquid {
        Some(l) => LoadingState::with_liquid(l.load()?),
        None => LoadingState::unloaded(),
    };
    loaded_velocity(plate, &loading, wavelength)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEstimate {
    /// kg/m^3
    pub density: f64,
    /// Set when the estimate lies outside the calibrated density span.
    pub out_of_range: bool,
}

/// Reads density off a calibration line.
pub fn invert_density_calibrated(frequency: f64, fit: &CalibrationFit) -> Result<DensityEstimate> {
    if !(fit.slope.is_finite() && fit.slope != 0.0) {
        return Err(FpwError::DegenerateFit("calibration slope is zero".into()));
    }
    let density = (frequency - fit.intercept) / fit.slope;
    let (lo, hi) = fit.density_range();
    let margin = 1e-9 * (hi - lo).abs().max(hi.abs());
    Ok(DensityEstimate {
        density,
        out_of_range: density < lo - margin || density > hi + margin,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingVerdict {
    /// The viscous term is small; frequency maps to density.
    DensitySensingValid,
    /// Viscosity and density cannot be separated from frequency alone.
    Coupled,
}

impl fmt::Display for CouplingVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::DensitySensingValid => f.write_str("density-sensing valid"),
            Self::Coupled => f.write_str("coupled - not invertible from frequency alone"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CouplingReport {
    pub liquid: String,
    /// `M_eta`, kg/m^2
    pub viscous_mass: f64,
    /// `rho delta_e`, kg/m^2
    pub entrained_mass: f64,
    /// `M_eta / (rho delta_e)`
    pub ratio: f64,
    /// `M_eta / (rho delta_e + M_eta)`
    pub viscous_fraction: f64,
    pub threshold: f64,
    pub verdict: CouplingVerdict,
    /// Loaded operating frequency the masses were evaluated at, Hz.
    pub frequency: f64,
}

/// Compares the viscous and entrained masses at the loaded operating point.
pub fn viscosity_coupling_report(
    liquid: &LiquidSample,
    plate: &CompositePlate,
    wavelength: f64,
    threshold: f64,
) -> Result<CouplingReport> {
    if !(threshold.is_finite() && threshold > 0.0 && threshold < 1.0) {
        return Err(invalid("coupling threshold must lie in (0, 1)"));
    }
    let sol = predict(plate, wavelength, Some(liquid))?;
    let added = sol.entrained_mass + sol.viscous_mass;
    let viscous_fraction = sol.viscous_mass / added;
    Ok(CouplingReport {
        liquid: liquid.name.clone(),
        viscous_mass: sol.viscous_mass,
        entrained_mass: sol.entrained_mass,
        ratio: sol.viscous_mass / sol.entrained_mass,
        viscous_fraction,
        threshold,
        verdict: if viscous_fraction > threshold {
            CouplingVerdict::Coupled
        } else {
            CouplingVerdict::DensitySensingValid
        },
        frequency: sol.resonant_frequency,
    })
}

/// First-order frequency shift from in-plane tension, `f0 s_T T`.
pub fn tension_effect(frequency: f64, tension_sensitivity: f64, tension: f64) -> Result<f64> {
    if !(tension.is_finite() && tension >= 0.0) {
        return Err(invalid("tension must be >= 0"));
    }
    if !(frequency.is_finite() && tension_sensitivity.is_finite()) {
        return Err(invalid("frequency and sensitivity must be finite"));
    }
    Ok(frequency * tension_sensitivity * tension)
}

/// Published device numbers, kept verbatim for side-by-side display.
pub mod reference {
    /// Estimated (frequency MHz) for low-viscosity liquids.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct TheoreticalPoint {
        pub liquid: &'static str,
        /// g/cm^3
        pub density: f64,
        /// Pa*s
        pub viscosity: f64,
        /// m/s
        pub phase_velocity: f64,
        /// MHz
        pub frequency_mhz: f64,
    }

    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct ViscosityComparison {
        pub liquid: &'static str,
        pub theoretical_mhz: f64,
        pub experimental_mhz: f64,
        pub insertion_loss_db: f64,
    }

    pub const LOW_VISCOSITY_ESTIMATES: [TheoreticalPoint; 3] = [
        TheoreticalPoint {
            liquid: "ipa",
            density: 0.787,
            viscosity: 0.0025,
            phase_velocity: 197.48,
            frequency_mhz: 4.94,
        },
        TheoreticalPoint {
            liquid: "water",
            density: 1.0,
            viscosity: 0.001,
            phase_velocity: 190.05,
            frequency_mhz: 4.75,
        },
        TheoreticalPoint {
            liquid: "saline",
            density: 1.2,
            viscosity: 0.0015,
            phase_velocity: 183.77,
            frequency_mhz: 4.59,
        },
    ];

    pub const VISCOSITY_COMPARISON: [ViscosityComparison; 2] = [
        ViscosityComparison {
            liquid: "saline",
            theoretical_mhz: 4.59,
            experimental_mhz: 4.98,
            insertion_loss_db: -33.38,
        },
        ViscosityComparison {
            liquid: "glycerol",
            theoretical_mhz: 4.49,
            experimental_mhz: 4.73,
            insertion_loss_db: -37.04,
        },
    ];

    /// Measured unloaded resonance, MHz.
    pub const UNLOADED_MEASURED_MHZ: f64 = 5.53;
    /// Estimated unloaded resonance, MHz.
    pub const UNLOADED_ESTIMATED_MHZ: f64 = 5.88;
    /// Reported frequency-density slope, MHz per g/cm^3.
    pub const DENSITY_SENSITIVITY_MHZ: f64 = -0.848;

    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct ReferenceDatasets {
        pub low_viscosity: &'static [TheoreticalPoint],
        pub viscosity_comparison: &'static [ViscosityComparison],
        pub unloaded_measured_mhz: f64,
    }

    pub fn load_reference_datasets() -> ReferenceDatasets {
        ReferenceDatasets {
            low_viscosity: &LOW_VISCOSITY_ESTIMATES,
            viscosity_comparison: &VISCOSITY_COMPARISON,
            unloaded_measured_mhz: UNLOADED_MEASURED_MHZ,
        }
    }

    /// Low-viscosity estimates as `(kg/m^3, Hz)` calibration points.
    pub fn low_viscosity_points() -> Vec<(f64, f64)> {
        LOW_VISCOSITY_ESTIMATES
            .iter()
            .map(|p| (p.density * 1e3, p.frequency_mhz * 1e6))
            .collect()
    }
}
