//! Phase velocity of the A0 (flexural) plate mode under tension and liquid
//! loading, its first-order sensitivities, and the inverse problem of
//! recovering liquid density from a measured resonant frequency.
//!
//! The loaded velocity is
//!
//! ```text
//! v = sqrt((T + B) / (M + rho * delta_e + M_eta))
//! ```
//!
//! with `delta_e = lambda / (2 pi)` and `M_eta = rho * delta_v / 2`, where the
//! viscous decay length `delta_v = sqrt(2 eta / (omega rho))` depends on the
//! operating frequency `omega = 2 pi v / lambda`. That circular dependence is
//! closed with a fixed-point iteration seeded at the unloaded velocity.

use std::f64::consts::PI;

use crate::error::{invalid, FpwError, Result};
use crate::plate::CompositePlate;

/// Speed of sound in water, m/s. Reference for the slow-wave condition.
pub const WATER_SOUND_SPEED: f64 = 1482.0;

/// Above this `v / c_liquid` ratio the evanescent-length approximation is
/// reported as questionable.
pub const SLOW_WAVE_RATIO_LIMIT: f64 = 0.3;

/// Relative change between iterates that ends the fixed-point solve.
pub const FIXED_POINT_TOLERANCE: f64 = 1e-10;
pub const FIXED_POINT_MAX_ITERATIONS: usize = 100;

/// A liquid in contact with the membrane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LiquidLoad {
    /// kg/m^3
    pub density: f64,
    /// Pa*s
    pub viscosity: f64,
    /// Whether the liquid column is deeper than the evanescent decay length.
    pub covers_decay_length: bool,
}

impl LiquidLoad {
    pub fn new(density: f64, viscosity: f64) -> Result<Self> {
        let load = Self {
            density,
            viscosity,
            covers_decay_length: true,
        };
        load.validate()?;
        Ok(load)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.density.is_finite() && self.density > 0.0) {
            return Err(invalid("liquid density must be > 0"));
        }
        if !(self.viscosity.is_finite() && self.viscosity >= 0.0) {
            return Err(invalid("liquid viscosity must be >= 0"));
        }
        Ok(())
    }
}

/// In-plane tension (N/m, tensile positive) plus an optional liquid.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LoadingState {
    pub tension: f64,
    pub liquid: Option<LiquidLoad>,
}

impl LoadingState {
    pub fn unloaded() -> Self {
        Self::default()
    }

    pub fn with_liquid(liquid: LiquidLoad) -> Self {
        Self {
            tension: 0.0,
            liquid: Some(liquid),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tension.is_finite() && self.tension >= 0.0) {
            return Err(invalid(
                "tension must be finite and >= 0 (compressive membranes unsupported)",
            ));
        }
        if let Some(liquid) = &self.liquid {
            liquid.validate()?;
        }
        Ok(())
    }

    fn density(&self) -> f64 {
        self.liquid.map_or(0.0, |l| l.density)
    }
}

/// Non-fatal conditions attached to a velocity solution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DispersionWarning {
    /// The liquid layer is thinner than the evanescent decay length, so the
    /// entrained-mass term overstates the loading.
    ShallowLiquid,
    /// The plate wave is not much slower than sound in the liquid.
    FastWave { velocity_ratio: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct VelocitySolution {
    /// m/s
    pub phase_velocity: f64,
    /// Hz
    pub resonant_frequency: f64,
    /// m, zero without liquid
    pub evanescent_length: f64,
    /// m
    pub viscous_length: f64,
    /// kg/m^2
    pub viscous_mass: f64,
    /// Membrane areal mass `M`, kg/m^2.
    pub plate_mass: f64,
    /// Evanescent entrained mass `rho delta_e`, kg/m^2.
    pub entrained_mass: f64,
    /// Total areal mass `M + rho delta_e + M_eta`, kg/m^2.
    pub total_mass: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `v / c_water` when a liquid is present.
    pub sound_speed_ratio: Option<f64>,
    pub warnings: Vec<DispersionWarning>,
}

impl VelocitySolution {
    pub fn angular_frequency(&self) -> f64 {
        2.0 * PI * self.resonant_frequency
    }
}

/// Free-plate velocity `sqrt(B / M)`.
pub fn unloaded_velocity(bending: f64, mass_per_area: f64) -> Result<f64> {
    if !(bending.is_finite() && bending > 0.0) {
        return Err(invalid("bending term must be > 0"));
    }
    if !(mass_per_area.is_finite() && mass_per_area > 0.0) {
        return Err(invalid("mass per area must be > 0"));
    }
    Ok((bending / mass_per_area).sqrt())
}

/// Evanescent decay length `lambda / (2 pi)`.
pub fn evanescent_decay_length(wavelength: f64) -> Result<f64> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(invalid("wavelength must be > 0"));
    }
    Ok(wavelength / (2.0 * PI))
}

/// Viscous decay length and the areal mass it drags along: `(delta_v, M_eta)`.
pub fn viscous_mass(liquid: &LiquidLoad, angular_frequency: f64) -> Result<(f64, f64)> {
    liquid.validate()?;
    if !(angular_frequency.is_finite() && angular_frequency > 0.0) {
        return Err(invalid("angular frequency must be > 0"));
    }
    let delta_v = (2.0 * liquid.viscosity / (angular_frequency * liquid.density)).sqrt();
    Ok((delta_v, liquid.density * delta_v / 2.0))
}

/// `f = v / lambda`.
pub fn resonant_frequency(phase_velocity: f64, wavelength: f64) -> Result<f64> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(invalid("wavelength must be > 0"));
    }
    if !(phase_velocity.is_finite() && phase_velocity > 0.0) {
        return Err(invalid("phase velocity must be > 0"));
    }
    Ok(phase_velocity / wavelength)
}

/// Solves for the loaded phase velocity.
pub fn loaded_velocity(
    plate: &CompositePlate,
    loading: &LoadingState,
    wavelength: f64,
) -> Result<VelocitySolution> {
    loading.validate()?;
    let bending = plate.bending_term(wavelength)?;
    let plate_mass = plate.mass_per_area();
    let stiffness = loading.tension + bending;

    let mut warnings = Vec::new();
    let (evanescent_length, entrained) = match &loading.liquid {
        Some(liquid) => {
            if !liquid.covers_decay_length {
                warnings.push(DispersionWarning::ShallowLiquid);
            }
            let delta_e = evanescent_decay_length(wavelength)?;
            (delta_e, liquid.density * delta_e)
        }
        None => (0.0, 0.0),
    };
    let static_mass = plate_mass + entrained;

    let mut velocity = unloaded_velocity(stiffness, plate_mass)?;
    let mut viscous = (0.0, 0.0);
    let mut iterations = 0;

    let viscous_liquid = loading.liquid.filter(|l| l.viscosity > 0.0);
    match viscous_liquid {
        None => {
            velocity = (stiffness / static_mass).sqrt();
        }
        Some(liquid) => loop {
            if iterations == FIXED_POINT_MAX_ITERATIONS {
                return Err(FpwError::NotConverged {
                    iterations,
                    last_velocity: velocity,
                });
            }
            iterations += 1;
            let omega = 2.0 * PI * velocity / wavelength;
            viscous = viscous_mass(&liquid, omega)?;
            let next = (stiffness / (static_mass + viscous.1)).sqrt();
            let change = ((next - velocity) / next).abs();
            velocity = next;
            if change < FIXED_POINT_TOLERANCE {
                break;
            }
        },
    }

    let sound_speed_ratio = loading.liquid.map(|_| velocity / WATER_SOUND_SPEED);
    if let Some(ratio) = sound_speed_ratio {
        if ratio >= SLOW_WAVE_RATIO_LIMIT {
            warnings.push(DispersionWarning::FastWave {
                velocity_ratio: ratio,
            });
        }
    }

    Ok(VelocitySolution {
        phase_velocity: velocity,
        resonant_frequency: resonant_frequency(velocity, wavelength)?,
        evanescent_length,
        viscous_length: viscous.0,
        viscous_mass: viscous.1,
        plate_mass,
        entrained_mass: entrained,
        total_mass: static_mass + viscous.1,
        iterations,
        converged: true,
        sound_speed_ratio,
        warnings,
    })
}

/// First-order relative velocity sensitivities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sensitivities {
    /// `(1/v) dv/d rho`, m^3/kg
    pub mass: f64,
    /// `(1/v) dv/dT`, m/N
    pub tension: f64,
}

/// `s_m = -delta_e / (2 (M + rho delta_e))` and `s_T = 1 / (2 (T + B))`.
///
/// Viscous mass is not part of either expression; they are exact derivatives
/// of the loaded velocity only for inviscid liquids.
pub fn sensitivities(
    plate: &CompositePlate,
    loading: &LoadingState,
    wavelength: f64,
) -> Result<Sensitivities> {
    loading.validate()?;
    let bending = plate.bending_term(wavelength)?;
    let delta_e = evanescent_decay_length(wavelength)?;
    let mass = plate.mass_per_area();
    Ok(Sensitivities {
        mass: -delta_e / (2.0 * (mass + loading.density() * delta_e)),
        tension: 1.0 / (2.0 * (loading.tension + bending)),
    })
}

/// Recovers liquid density from a measured resonant frequency.
///
/// Writing `A = (T + B) / v^2 - M` with `v = f lambda`, the loaded-velocity
/// relation becomes `rho delta_e + sqrt(eta rho / (2 omega)) = A`, which is a
/// quadratic in `sqrt(rho)` because `omega = 2 pi f` is known.
pub fn density_from_frequency(
    measured_frequency: f64,
    plate: &CompositePlate,
    wavelength: f64,
    viscosity: f64,
    tension: f64,
) -> Result<f64> {
    if !(measured_frequency.is_finite() && measured_frequency > 0.0) {
        return Err(invalid("measured frequency must be > 0"));
    }
    if !(viscosity.is_finite() && viscosity >= 0.0) {
        return Err(invalid("viscosity must be >= 0"));
    }
    if !(tension.is_finite() && tension >= 0.0) {
        return Err(invalid("tension must be >= 0"));
    }
    let stiffness = tension + plate.bending_term(wavelength)?;
    let mass = plate.mass_per_area();
    let unloaded = unloaded_velocity(stiffness, mass)? / wavelength;
    if measured_frequency >= unloaded {
        return Err(FpwError::NoSolution(format!(
            "measured {measured_frequency:.6e} Hz is not below the unloaded {unloaded:.6e} Hz"
        )));
    }
    let velocity = measured_frequency * wavelength;
    let added = stiffness / (velocity * velocity) - mass;
    let delta_e = evanescent_decay_length(wavelength)?;
    if viscosity == 0.0 {
        return Ok(added / delta_e);
    }
    let c = (viscosity / (2.0 * 2.0 * PI * measured_frequency)).sqrt();
    let root = (-c + (c * c + 4.0 * delta_e * added).sqrt()) / (2.0 * delta_e);
    Ok(root * root)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::plate::{reference_layers, reference_overrides};
    use approx::assert_relative_eq;

    const LAMBDA: f64 = 40e-6;

    fn reference_plate() -> CompositePlate {
        CompositePlate::new(reference_layers())
            .unwrap()
            .with_overrides(reference_overrides())
            .unwrap()
    }

    fn liquid(rho: f64, eta: f64) -> LoadingState {
        LoadingState::with_liquid(LiquidLoad::new(rho, eta).unwrap())
    }

    #[test]
    fn unloaded_velocity_cases() {
        assert_relative_eq!(
            unloaded_velocity(6497.93, 0.1176).unwrap(),
            235.06,
            max_relative = 1e-3
        );
        assert_eq!(unloaded_velocity(1.0, 1.0).unwrap(), 1.0);
        let v = unloaded_velocity(3.0, 2.0).unwrap();
        assert_relative_eq!(
            unloaded_velocity(3.0, 8.0).unwrap(),
            v / 2.0,
            max_relative = 1e-15
        );
        assert!(unloaded_velocity(0.0, 1.0).is_err());
        assert!(unloaded_velocity(1.0, -1.0).is_err());
    }

    #[test]
    fn evanescent_length_cases() {
        assert_relative_eq!(
            evanescent_decay_length(40e-6).unwrap(),
            6.366_197_723_675_814e-6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            evanescent_decay_length(2.0 * PI).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        assert!(evanescent_decay_length(0.0).is_err());
    }

    #[test]
    fn viscous_mass_cases() {
        // sqrt(2 eta / (omega rho)), evaluated at 30 digits
        let (dv, m) = viscous_mass(&LiquidLoad::new(1000.0, 0.001).unwrap(), 3.692e7).unwrap();
        assert_relative_eq!(dv, 2.327_470_320_58e-7, max_relative = 1e-10);
        assert_relative_eq!(m, 1.163_735_160_29e-4, max_relative = 1e-10);

        let (dv, m) = viscous_mass(&LiquidLoad::new(1200.0, 0.934).unwrap(), 2.821e7).unwrap();
        assert_relative_eq!(dv, 7.428_416_908_2e-6, max_relative = 1e-10);
        assert_relative_eq!(m, 4.457_050_144_92e-3, max_relative = 1e-10);

        assert_eq!(
            viscous_mass(&LiquidLoad::new(1000.0, 0.0).unwrap(), 1e7).unwrap(),
            (0.0, 0.0)
        );
        assert!(viscous_mass(&LiquidLoad::new(1000.0, 0.001).unwrap(), 0.0).is_err());
    }

    #[test]
    fn resonant_frequency_cases() {
        assert_relative_eq!(
            resonant_frequency(235.06, 40e-6).unwrap(),
            5.8765e6,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            resonant_frequency(2400.0, 40e-6).unwrap(),
            60e6,
            max_relative = 1e-12
        );
        assert_eq!(resonant_frequency(1.0, 1.0).unwrap(), 1.0);
    }

    #[test]
    fn unloaded_plate_degenerates_to_free_velocity() {
        let sol = loaded_velocity(&reference_plate(), &LoadingState::unloaded(), LAMBDA).unwrap();
        assert_relative_eq!(sol.phase_velocity, 235.06, max_relative = 1e-3);
        assert_relative_eq!(sol.resonant_frequency, 5.876e6, max_relative = 1e-3);
        assert_eq!(sol.iterations, 0);
        assert!(sol.converged);
        assert!(sol.warnings.is_empty());
        assert_eq!(sol.sound_speed_ratio, None);
    }

    #[test]
    fn water_matches_frozen_oracle() {
        // 30-digit fixed point of the loaded-velocity relation, run offline
        let sol = loaded_velocity(&reference_plate(), &liquid(1000.0, 0.001), LAMBDA).unwrap();
        assert_relative_eq!(sol.phase_velocity, 228.838_652_126_299, max_relative = 1e-9);
        assert_relative_eq!(sol.viscous_length, 2.358_795_925e-7, max_relative = 1e-8);
        assert_relative_eq!(sol.viscous_mass, 1.179_397_962e-4, max_relative = 1e-8);
        assert!(sol.converged && sol.iterations > 1);
    }

    #[test]
    fn glycerol_matches_frozen_oracle() {
        let sol = loaded_velocity(&reference_plate(), &liquid(1200.0, 0.934), LAMBDA).unwrap();
        assert_relative_eq!(sol.phase_velocity, 224.237_850_294_338, max_relative = 1e-9);
        assert_relative_eq!(sol.viscous_mass, 3.988_730_225e-3, max_relative = 1e-8);
    }

    #[test]
    fn saline_slower_than_water() {
        let plate = reference_plate();
        let water = loaded_velocity(&plate, &liquid(1000.0, 0.001), LAMBDA).unwrap();
        let saline = loaded_velocity(&plate, &liquid(1200.0, 0.0015), LAMBDA).unwrap();
        assert!(saline.phase_velocity < water.phase_velocity);
    }

    #[test]
    fn shallow_liquid_warns() {
        let mut load = LiquidLoad::new(1000.0, 0.001).unwrap();
        load.covers_decay_length = false;
        let sol =
            loaded_velocity(&reference_plate(), &LoadingState::with_liquid(load), LAMBDA).unwrap();
        assert!(sol.warnings.contains(&DispersionWarning::ShallowLiquid));
        let ratio = sol.sound_speed_ratio.unwrap();
        assert_relative_eq!(ratio, sol.phase_velocity / WATER_SOUND_SPEED);
        assert!(ratio < SLOW_WAVE_RATIO_LIMIT);
    }

    #[test]
    fn negative_tension_rejected() {
        let loading = LoadingState {
            tension: -1.0,
            liquid: None,
        };
        assert!(loaded_velocity(&reference_plate(), &loading, LAMBDA).is_err());
    }

    #[test]
    fn sensitivity_values() {
        let plate = reference_plate();
        let s = sensitivities(&plate, &LoadingState::unloaded(), LAMBDA).unwrap();
        assert_relative_eq!(s.tension, 7.69e-5, max_relative = 5e-3);
        let delta_e = evanescent_decay_length(LAMBDA).unwrap();
        assert_eq!(s.mass, -delta_e / (2.0 * 0.1176));

        let water = sensitivities(&plate, &liquid(1000.0, 0.001), LAMBDA).unwrap();
        assert_relative_eq!(water.mass, -2.567_715_167_75e-5, max_relative = 1e-10);
    }

    #[test]
    fn density_inversion() {
        let plate = reference_plate();
        let sol = loaded_velocity(&plate, &liquid(1000.0, 0.0), LAMBDA).unwrap();
        let rho = density_from_frequency(sol.resonant_frequency, &plate, LAMBDA, 0.0, 0.0).unwrap();
        assert_relative_eq!(rho, 1000.0, max_relative = 1e-9);

        // closed form ((B / v^2) - M) / delta_e at 30 digits
        let rho = density_from_frequency(4.75e6, &plate, LAMBDA, 0.0, 0.0).unwrap();
        assert_relative_eq!(rho, 9_801.464_492_654_79, max_relative = 1e-9);

        assert!(matches!(
            density_from_frequency(5.9e6, &plate, LAMBDA, 0.0, 0.0),
            Err(FpwError::NoSolution(_))
        ));
    }

    #[test]
    fn viscous_density_inversion_round_trip() {
        let plate = reference_plate();
        for (rho, eta) in [(787.0, 0.0025), (1200.0, 0.934), (1500.0, 0.2)] {
            let sol = loaded_velocity(&plate, &liquid(rho, eta), LAMBDA).unwrap();
            let back =
                density_from_frequency(sol.resonant_frequency, &plate, LAMBDA, eta, 0.0).unwrap();
            assert_relative_eq!(back, rho, max_relative = 1e-8);
        }
    }
}
