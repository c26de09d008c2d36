//! Effective elastic and inertial parameters of a layered membrane.
//!
//! Stiffness and Poisson ratio are thickness-weighted averages over the
//! stack, the areal mass is the plain sum of `density * thickness`, and the
//! bending term is the flexural rigidity `E' h^3 / 12` multiplied by the
//! squared wavenumber `(2 pi / lambda)^2`, which carries units of N/m.
//!
//! Published tables do not always agree with the layer data they were
//! derived from, so a [`CompositePlate`] keeps the computed values and an
//! optional set of [`PlateOverrides`] side by side. Accessors return the
//! override when one is set; the computed values stay available through
//! [`CompositePlate::computed`].

use std::f64::consts::PI;

use crate::error::{invalid, Result};

/// One layer of the membrane stack. SI units throughout.
#[derive(Debug, Clone, PartialEq)]
pub struct MaterialLayer {
    pub name: String,
    /// m
    pub thickness: f64,
    /// N/m^2
    pub young_modulus: f64,
    pub poisson_ratio: f64,
    /// kg/m^3
    pub density: f64,
}

impl MaterialLayer {
    pub fn new(
        name: impl Into<String>,
        thickness: f64,
        young_modulus: f64,
        poisson_ratio: f64,
        density: f64,
    ) -> Result<Self> {
        let layer = Self {
            name: name.into(),
            thickness,
            young_modulus,
            poisson_ratio,
            density,
        };
        layer.validate()?;
        Ok(layer)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.thickness.is_finite() && self.thickness > 0.0) {
            return Err(invalid(format!(
                "layer '{}': thickness must be > 0",
                self.name
            )));
        }
        if !(self.young_modulus.is_finite() && self.young_modulus > 0.0) {
            return Err(invalid(format!(
                "layer '{}': Young's modulus must be > 0",
                self.name
            )));
        }
        if !(self.density.is_finite() && self.density > 0.0) {
            return Err(invalid(format!(
                "layer '{}': density must be > 0",
                self.name
            )));
        }
        if !(0.0..0.5).contains(&self.poisson_ratio) {
            return Err(invalid(format!(
                "layer '{}': Poisson ratio must lie in [0, 0.5)",
                self.name
            )));
        }
        Ok(())
    }

    /// Areal mass of this layer alone, kg/m^2.
    pub fn mass_per_area(&self) -> f64 {
        self.density * self.thickness
    }
}

fn check_stack(layers: &[MaterialLayer]) -> Result<()> {
    if layers.is_empty() {
        return Err(invalid("layer stack is empty"));
    }
    layers.iter().try_for_each(MaterialLayer::validate)
}

fn thickness_weighted(
    layers: &[MaterialLayer],
    value: impl Fn(&MaterialLayer) -> f64,
) -> Result<f64> {
    check_stack(layers)?;
    let (weighted, total) = layers.iter().fold((0.0, 0.0), |(w, t), layer| {
        (w + value(layer) * layer.thickness, t + layer.thickness)
    });
    Ok(weighted / total)
}

/// Thickness-weighted Young's modulus, `sum(E_i h_i) / sum(h_i)`.
pub fn effective_young_modulus(layers: &[MaterialLayer]) -> Result<f64> {
    thickness_weighted(layers, |l| l.young_modulus)
}

/// Thickness-weighted Poisson ratio.
pub fn effective_poisson(layers: &[MaterialLayer]) -> Result<f64> {
    thickness_weighted(layers, |l| l.poisson_ratio)
}

/// Areal mass of the stack, `sum(rho_i h_i)` in kg/m^2.
pub fn mass_per_area(layers: &[MaterialLayer]) -> Result<f64> {
    check_stack(layers)?;
    Ok(layers.iter().map(MaterialLayer::mass_per_area).sum())
}

/// Plate (biaxial) modulus `E / (1 - nu^2)`.
pub fn plate_modulus(young_modulus: f64, poisson_ratio: f64) -> Result<f64> {
    if !(young_modulus.is_finite() && young_modulus > 0.0) {
        return Err(invalid("Young's modulus must be > 0"));
    }
    if !(poisson_ratio.is_finite() && poisson_ratio.abs() < 1.0) {
        return Err(invalid("Poisson ratio must satisfy |nu| < 1"));
    }
    Ok(young_modulus / (1.0 - poisson_ratio * poisson_ratio))
}

/// Flexural rigidity `E' h^3 / 12` in N*m.
pub fn flexural_rigidity(plate_modulus: f64, thickness: f64) -> Result<f64> {
    if !(thickness.is_finite() && thickness > 0.0) {
        return Err(invalid("plate thickness must be > 0"));
    }
    if !(plate_modulus.is_finite() && plate_modulus > 0.0) {
        return Err(invalid("plate modulus must be > 0"));
    }
    Ok(plate_modulus * thickness.powi(3) / 12.0)
}

/// Bending term of the plate-wave velocity, `(E' h^3 / 12) (2 pi / lambda)^2` in N/m.
pub fn bending_term(plate_modulus: f64, thickness: f64, wavelength: f64) -> Result<f64> {
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(invalid("wavelength must be > 0"));
    }
    let k = 2.0 * PI / wavelength;
    Ok(flexural_rigidity(plate_modulus, thickness)? * k * k)
}

/// Values derived from the layer data alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlateProperties {
    pub thickness: f64,
    pub young_modulus: f64,
    pub poisson_ratio: f64,
    pub plate_modulus: f64,
    pub mass_per_area: f64,
}

/// Published values pinned in place of the computed ones.
///
/// `bending_term` is tied to the wavelength it was published for; when set it
/// is returned for any wavelength.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PlateOverrides {
    pub young_modulus: Option<f64>,
    pub poisson_ratio: Option<f64>,
    pub plate_modulus: Option<f64>,
    pub mass_per_area: Option<f64>,
    pub bending_term: Option<f64>,
}

impl PlateOverrides {
    pub fn is_empty(&self) -> bool {
        *self == Self::default()
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("young_modulus", self.young_modulus),
            ("plate_modulus", self.plate_modulus),
            ("mass_per_area", self.mass_per_area),
            ("bending_term", self.bending_term),
        ];
        for (name, value) in positive {
            if let Some(v) = value {
                if !(v.is_finite() && v > 0.0) {
                    return Err(invalid(format!("override {name} must be > 0")));
                }
            }
        }
        if let Some(nu) = self.poisson_ratio {
            if !(0.0..0.5).contains(&nu) {
                return Err(invalid("override poisson_ratio must lie in [0, 0.5)"));
            }
        }
        Ok(())
    }
}

/// A validated layer stack with its effective parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct CompositePlate {
    layers: Vec<MaterialLayer>,
    computed: PlateProperties,
    overrides: PlateOverrides,
}

impl CompositePlate {
    pub fn new(layers: Vec<MaterialLayer>) -> Result<Self> {
        check_stack(&layers)?;
        let young_modulus = effective_young_modulus(&layers)?;
        let poisson_ratio = effective_poisson(&layers)?;
        let computed = PlateProperties {
            thickness: layers.iter().map(|l| l.thickness).sum(),
            young_modulus,
            poisson_ratio,
            plate_modulus: plate_modulus(young_modulus, poisson_ratio)?,
            mass_per_area: mass_per_area(&layers)?,
        };
        Ok(Self {
            layers,
            computed,
            overrides: PlateOverrides::default(),
        })
    }

    pub fn with_overrides(mut self, overrides: PlateOverrides) -> Result<Self> {
        overrides.validate()?;
        self.overrides = overrides;
        Ok(self)
    }

    pub fn layers(&self) -> &[MaterialLayer] {
        &self.layers
    }

    pub fn computed(&self) -> &PlateProperties {
        &self.computed
    }

    pub fn overrides(&self) -> &PlateOverrides {
        &self.overrides
    }

    pub fn thickness(&self) -> f64 {
        self.computed.thickness
    }

    pub fn young_modulus(&self) -> f64 {
        self.overrides
            .young_modulus
            .unwrap_or(self.computed.young_modulus)
    }

    pub fn poisson_ratio(&self) -> f64 {
        self.overrides
            .poisson_ratio
            .unwrap_or(self.computed.poisson_ratio)
    }

    /// E', recomputed from the (possibly overridden) E and nu unless pinned itself.
    pub fn plate_modulus(&self) -> f64 {
        match self.overrides.plate_modulus {
            Some(v) => v,
            None => {
                let nu = self.poisson_ratio();
                self.young_modulus() / (1.0 - nu * nu)
            }
        }
    }

    pub fn mass_per_area(&self) -> f64 {
        self.overrides
            .mass_per_area
            .unwrap_or(self.computed.mass_per_area)
    }

    pub fn flexural_rigidity(&self) -> f64 {
        self.plate_modulus() * self.thickness().powi(3) / 12.0
    }

    /// B in N/m at the given acoustic wavelength.
    pub fn bending_term(&self, wavelength: f64) -> Result<f64> {
        let computed = bending_term(self.plate_modulus(), self.thickness(), wavelength)?;
        Ok(self.overrides.bending_term.unwrap_or(computed))
    }
}

/// The membrane used throughout the examples: 1.2 um SiNx under a 1.1 um
/// PZT+LSMO film. Electrode metals are left out.
pub fn reference_layers() -> Vec<MaterialLayer> {
    vec![
        MaterialLayer {
            name: "SiNx".into(),
            thickness: 1.2e-6,
            young_modulus: 3.85e11,
            poisson_ratio: 0.27,
            density: 3100.0,
        },
        MaterialLayer {
            name: "PZT+LSMO".into(),
            thickness: 1.1e-6,
            young_modulus: 8.6e10,
            poisson_ratio: 0.25,
            density: 7600.0,
        },
    ]
}

/// Published composite values for [`reference_layers`] at a 40 um wavelength.
pub fn reference_overrides() -> PlateOverrides {
    PlateOverrides {
        mass_per_area: Some(0.1176),
        bending_term: Some(6497.93),
        ..PlateOverrides::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn layer(h: f64, e: f64, nu: f64, rho: f64) -> MaterialLayer {
        MaterialLayer::new("x", h, e, nu, rho).unwrap()
    }

    #[test]
    fn reference_stack_matches_published_composite() {
        let layers = reference_layers();
        let e = effective_young_modulus(&layers).unwrap();
        let nu = effective_poisson(&layers).unwrap();
        assert_relative_eq!(e, 2.42e11, max_relative = 5e-3);
        assert_relative_eq!(nu, 0.26, max_relative = 5e-3);
        let ep = plate_modulus(e, nu).unwrap();
        assert_relative_eq!(ep, 2.6e11, max_relative = 5e-3);
        let b = bending_term(ep, 2.3e-6, 40e-6).unwrap();
        assert_relative_eq!(b, 6497.93, max_relative = 3e-3);
    }

    #[test]
    fn per_layer_and_total_mass() {
        let layers = reference_layers();
        assert_relative_eq!(layers[0].mass_per_area(), 0.00372, max_relative = 1e-12);
        assert_relative_eq!(layers[1].mass_per_area(), 0.00836, max_relative = 1e-12);
        assert_relative_eq!(
            mass_per_area(&layers).unwrap(),
            0.01208,
            max_relative = 1e-12
        );
    }

    #[test]
    fn single_and_symmetric_stacks() {
        let one = [layer(1e-6, 7e10, 0.3, 2000.0)];
        assert_eq!(effective_young_modulus(&one).unwrap(), 7e10);
        assert_eq!(effective_poisson(&one).unwrap(), 0.3);

        let two = [
            layer(1e-6, 1e11, 0.2, 2000.0),
            layer(1e-6, 3e11, 0.3, 2000.0),
        ];
        assert_relative_eq!(
            effective_young_modulus(&two).unwrap(),
            2e11,
            max_relative = 1e-15
        );
        assert_relative_eq!(effective_poisson(&two).unwrap(), 0.25, max_relative = 1e-15);
    }

    #[test]
    fn empty_stack_rejected() {
        assert!(effective_young_modulus(&[]).is_err());
        assert!(effective_poisson(&[]).is_err());
        assert!(mass_per_area(&[]).is_err());
        assert!(CompositePlate::new(vec![]).is_err());
    }

    #[test]
    fn layer_invariants() {
        assert!(MaterialLayer::new("a", 0.0, 1.0, 0.2, 1.0).is_err());
        assert!(MaterialLayer::new("a", 1.0, -1.0, 0.2, 1.0).is_err());
        assert!(MaterialLayer::new("a", 1.0, 1.0, 0.5, 1.0).is_err());
        assert!(MaterialLayer::new("a", 1.0, 1.0, -0.1, 1.0).is_err());
        assert!(MaterialLayer::new("a", 1.0, 1.0, 0.2, 0.0).is_err());
    }

    #[test]
    fn plate_modulus_cases() {
        assert_eq!(plate_modulus(5.0, 0.0).unwrap(), 5.0);
        assert_relative_eq!(
            plate_modulus(1.0, 0.5).unwrap(),
            4.0 / 3.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            plate_modulus(2.42e11, 0.26).unwrap(),
            2.596e11,
            max_relative = 5e-4
        );
        assert!(plate_modulus(1.0, 1.0).is_err());
        assert!(plate_modulus(1.0, 1.5).is_err());
    }

    #[test]
    fn bending_term_scaling() {
        let b = bending_term(2.596e11, 2.3e-6, 40e-6).unwrap();
        assert_relative_eq!(
            bending_term(2.596e11, 2.3e-6, 80e-6).unwrap(),
            b / 4.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            bending_term(2.596e11, 4.6e-6, 40e-6).unwrap(),
            b * 8.0,
            max_relative = 1e-12
        );
        assert!(bending_term(2.596e11, 0.0, 40e-6).is_err());
        assert!(bending_term(2.596e11, 2.3e-6, 0.0).is_err());
        assert!(bending_term(2.596e11, 2.3e-6, -1.0).is_err());
    }

    #[test]
    fn overrides_take_precedence_but_computed_is_kept() {
        let plate = CompositePlate::new(reference_layers())
            .unwrap()
            .with_overrides(reference_overrides())
            .unwrap();
        assert_eq!(plate.mass_per_area(), 0.1176);
        assert_relative_eq!(
            plate.computed().mass_per_area,
            0.01208,
            max_relative = 1e-12
        );
        assert_eq!(plate.bending_term(40e-6).unwrap(), 6497.93);
        assert_relative_eq!(plate.thickness(), 2.3e-6, max_relative = 1e-12);

        let bare = CompositePlate::new(reference_layers()).unwrap();
        assert_relative_eq!(
            bare.bending_term(40e-6).unwrap(),
            6497.93,
            max_relative = 3e-3
        );
        assert!(bare.overrides().is_empty());
    }

    #[test]
    fn override_validation() {
        let plate = CompositePlate::new(reference_layers()).unwrap();
        let bad = PlateOverrides {
            mass_per_area: Some(-1.0),
            ..Default::default()
        };
        assert!(plate.clone().with_overrides(bad).is_err());
        let bad_nu = PlateOverrides {
            poisson_ratio: Some(0.7),
            ..Default::default()
        };
        assert!(plate.with_overrides(bad_nu).is_err());
    }

    #[test]
    fn overridden_modulus_feeds_plate_modulus() {
        let plate = CompositePlate::new(reference_layers())
            .unwrap()
            .with_overrides(PlateOverrides {
                young_modulus: Some(2.42e11),
                poisson_ratio: Some(0.26),
                ..Default::default()
            })
            .unwrap();
        assert_relative_eq!(
            plate.plate_modulus(),
            2.42e11 / (1.0 - 0.26 * 0.26),
            max_relative = 1e-15
        );
    }
}
