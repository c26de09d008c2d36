//! Coupling-of-modes model of a two-port resonator: two interdigital
//! transducers between a pair of reflection gratings.
//!
//! The device is read left to right as
//!
//! ```text
//! grating | gap | IDT (input) | separation | IDT (output) | gap | grating
//! ```
//!
//! and each section contributes one transmission matrix; see [`cascade`].

mod blocks;
mod cascade;
mod matrix;
mod resonance;

pub use blocks::{
    array_factor, design_spacing, grating_matrix, idt_matrix, spacing_matrix, GratingSide,
};
pub use cascade::{
    cascade, format_sci, fpw_device_response, s21_at, s21_sweep, two_port_admittance, write_csv,
    CascadeResult, FpwResponseOptions, FrequencyResponse, ResponsePoint, SweepPlan,
};
pub use matrix::{MixedMatrix3, TransmissionMatrix2};
pub use resonance::{find_resonance, ResonanceSummary};

use crate::error::{invalid, Result};

/// Physical layout of the resonator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceGeometry {
    /// Acoustic wavelength at the design frequency (IDT period), m.
    pub wavelength: f64,
    pub idt_pairs: u32,
    /// Strips per grating; zero builds a plain delay line.
    pub grating_strips: u32,
    /// Acoustic aperture in wavelengths.
    pub overlap_wavelengths: f64,
    /// Edge-to-edge gap between the two IDTs in wavelengths.
    pub separation_wavelengths: f64,
    /// Gap between each grating and its neighbouring IDT, m.
    pub grating_gap: f64,
    /// Strip width over strip period. Carried for reporting; the per-strip
    /// reflectivity and capacitance in [`ComParameters`] already include it.
    pub metallization_ratio: f64,
}

impl DeviceGeometry {
    /// Two-port layout with 20 IDT pairs, 40-strip gratings, a 50 wavelength
    /// aperture, 10 wavelengths between IDTs and a `lambda/8` grating gap.
    pub fn reference(wavelength: f64) -> Self {
        Self {
            wavelength,
            idt_pairs: 20,
            grating_strips: 40,
            overlap_wavelengths: 50.0,
            separation_wavelengths: 10.0,
            grating_gap: wavelength / 8.0,
            metallization_ratio: 0.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.wavelength.is_finite() && self.wavelength > 0.0) {
            return Err(invalid("wavelength must be > 0"));
        }
        if self.idt_pairs == 0 {
            return Err(invalid("IDT must have at least one finger pair"));
        }
        if !(self.overlap_wavelengths.is_finite() && self.overlap_wavelengths > 0.0) {
            return Err(invalid("overlap must be > 0"));
        }
        if !(self.separation_wavelengths.is_finite() && self.separation_wavelengths >= 0.0) {
            return Err(invalid("IDT separation must be >= 0"));
        }
        if !(self.grating_gap.is_finite() && self.grating_gap >= 0.0) {
            return Err(invalid("grating gap must be >= 0"));
        }
        if !(self.metallization_ratio > 0.0 && self.metallization_ratio < 1.0) {
            return Err(invalid("metallization ratio must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn idt_length(&self) -> f64 {
        f64::from(self.idt_pairs) * self.wavelength
    }

    /// Strip period is half a wavelength.
    pub fn grating_length(&self) -> f64 {
        f64::from(self.grating_strips) * self.wavelength / 2.0
    }

    pub fn separation(&self) -> f64 {
        self.separation_wavelengths * self.wavelength
    }

    /// Acoustic path between the outer edges of the two gratings.
    pub fn total_length(&self) -> f64 {
        2.0 * self.grating_length()
            + 2.0 * self.grating_gap
            + 2.0 * self.idt_length()
            + self.separation()
    }

    /// Same layout with the grating gap replaced.
    pub fn with_gap(mut self, gap: f64) -> Self {
        self.grating_gap = gap;
        self
    }

    pub fn without_gratings(mut self) -> Self {
        self.grating_strips = 0;
        self
    }
}

/// Material-level COM constants.
///
/// Reflectivity, transduction and capacitance of Pt/Ti electrodes on
/// sol-gel PZT have not been measured; the defaults are placeholders
/// chosen to give a clearly resolved resonance and should be replaced with
/// fitted values for a real device.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComParameters {
    /// Free-surface phase velocity, m/s.
    pub free_velocity: f64,
    /// Reflection magnitude of one grating strip.
    pub strip_reflectivity: f64,
    /// Extra phase of the grating reflection at its inner reference plane, rad.
    pub reflection_phase: f64,
    /// Acoustic amplitude launched per volt, per finger pair and per square
    /// root of aperture wavelength, in sqrt(W)/V.
    pub transduction_strength: f64,
    /// F per finger pair.
    pub static_capacitance_per_pair: f64,
    /// Amplitude attenuation, Np/m.
    pub attenuation: f64,
    /// Source and load resistance of both electrical ports, ohm.
    pub port_impedance: f64,
}

impl ComParameters {
    pub const DEFAULT_STRIP_REFLECTIVITY: f64 = 0.02;
    pub const DEFAULT_TRANSDUCTION: f64 = 1.5e-4;
    pub const DEFAULT_CAPACITANCE_PER_PAIR: f64 = 0.1e-12;
    pub const DEFAULT_PORT_IMPEDANCE: f64 = 50.0;

    pub fn with_velocity(free_velocity: f64) -> Self {
        Self {
            free_velocity,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.free_velocity.is_finite() && self.free_velocity > 0.0) {
            return Err(invalid("free velocity must be > 0"));
        }
        if !(self.strip_reflectivity.is_finite() && self.strip_reflectivity.abs() < 0.2) {
            return Err(invalid("strip reflectivity magnitude must be < 0.2"));
        }
        if !self.reflection_phase.is_finite() {
            return Err(invalid("reflection phase must be finite"));
        }
        if !(self.transduction_strength.is_finite() && self.transduction_strength >= 0.0) {
            return Err(invalid("transduction strength must be >= 0"));
        }
        if !(self.static_capacitance_per_pair.is_finite()
            && self.static_capacitance_per_pair >= 0.0)
        {
            return Err(invalid("static capacitance must be >= 0"));
        }
        if !(self.attenuation.is_finite() && self.attenuation >= 0.0) {
            return Err(invalid("attenuation must be >= 0"));
        }
        if !(self.port_impedance.is_finite() && self.port_impedance > 0.0) {
            return Err(invalid("port impedance must be > 0"));
        }
        Ok(())
    }
}

impl Default for ComParameters {
    /// Bulk PZT at 2400 m/s with the placeholder constants.
    fn default() -> Self {
        Self {
            free_velocity: 2400.0,
            strip_reflectivity: Self::DEFAULT_STRIP_REFLECTIVITY,
            reflection_phase: 0.0,
            transduction_strength: Self::DEFAULT_TRANSDUCTION,
            static_capacitance_per_pair: Self::DEFAULT_CAPACITANCE_PER_PAIR,
            attenuation: 0.0,
            port_impedance: Self::DEFAULT_PORT_IMPEDANCE,
        }
    }
}
