use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use super::blocks::{grating_matrix, idt_matrix, spacing_matrix, GratingSide};
use super::matrix::{MixedMatrix3, TransmissionMatrix2};
use super::{ComParameters, DeviceGeometry};
use crate::dispersion::{loaded_velocity, LoadingState};
use crate::error::{invalid, Result};
use crate::plate::CompositePlate;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Below this `|M11|` the boundary system is treated as singular.
const SINGULAR_THRESHOLD: f64 = 1e-300;

/// All blocks of the device at one frequency, left to right.
#[derive(Debug, Clone, PartialEq)]
pub struct CascadeResult {
    pub left_grating: TransmissionMatrix2,
    pub left_gap: TransmissionMatrix2,
    pub input_idt: MixedMatrix3,
    pub separation: TransmissionMatrix2,
    pub output_idt: MixedMatrix3,
    pub right_gap: TransmissionMatrix2,
    pub right_grating: TransmissionMatrix2,
    /// `G1 D2 T3 D4 T5 D6 G7` over the acoustic blocks.
    pub overall: TransmissionMatrix2,
    /// `G1 D2 tau3`: left-end amplitudes per volt on the input IDT.
    pub input_coupling: [Complex64; 2],
    /// `G1 D2 T3 D4 tau5`: the same for the output IDT.
    pub output_coupling: [Complex64; 2],
}

/// Builds and multiplies the section matrices at `frequency`.
///
/// With no gratings (`grating_strips == 0`) the grating blocks are identity.
pub fn cascade(
    geometry: &DeviceGeometry,
    params: &ComParameters,
    frequency: f64,
) -> Result<CascadeResult> {
    geometry.validate()?;
    params.validate()?;
    let (left_grating, right_grating) = if geometry.grating_strips == 0 {
        (
            TransmissionMatrix2::identity(),
            TransmissionMatrix2::identity(),
        )
    } else {
        (
            grating_matrix(frequency, geometry, params, GratingSide::Left)?,
            grating_matrix(frequency, geometry, params, GratingSide::Right)?,
        )
    };
    let gap = spacing_matrix(frequency, geometry.grating_gap, params)?;
    let separation = spacing_matrix(frequency, geometry.separation(), params)?;
    let idt = idt_matrix(frequency, geometry, params)?;

    let to_input = left_grating * gap;
    let to_output = to_input * idt.acoustic() * separation;
    let overall = to_output * idt.acoustic() * gap * right_grating;
    let tau = idt.coupling();

    Ok(CascadeResult {
        left_grating,
        left_gap: gap,
        input_idt: idt,
        separation,
        output_idt: idt,
        right_gap: gap,
        right_grating,
        overall,
        input_coupling: to_input.apply(tau),
        output_coupling: to_output.apply(tau),
    })
}

impl CascadeResult {
    /// Terminal currents `(I1, I2)` for drive voltages `(V1, V2)` with no
    /// acoustic energy entering from beyond the gratings.
    ///
    /// Returns `None` when the boundary system is singular.
    pub fn currents(&self, v1: Complex64, v2: Complex64) -> Option<(Complex64, Complex64)> {
        let m11 = self.overall.m[0][0];
        if m11.norm().is_nan() || m11.norm() <= SINGULAR_THRESHOLD {
            return None;
        }
        // W0 = M W7 + V1 G1 D2 tau3 + V2 G1 D2 T3 D4 tau5, with W0+ = 0 and W7- = 0
        let driven = self.input_coupling[0] * v1 + self.output_coupling[0] * v2;
        let w7 = [-driven / m11, ZERO];
        let w6 = self.right_grating.apply(w7);
        let w5 = self.right_gap.apply(w6);
        let i2 = self.output_idt.current(w5, v2);
        let w4 = self.output_idt.propagate(w5, v2);
        let w3 = self.separation.apply(w4);
        let i1 = self.input_idt.current(w3, v1);
        let out = (i1, i2);
        (out.0.is_finite() && out.1.is_finite()).then_some(out)
    }
}

/// Short-circuit admittance matrix `[[Y11, Y12], [Y21, Y22]]` of the two
/// electrical ports.
pub fn two_port_admittance(cascade: &CascadeResult) -> Option<[[Complex64; 2]; 2]> {
    let (y11, y21) = cascade.currents(ONE, ZERO)?;
    let (y12, y22) = cascade.currents(ZERO, ONE)?;
    Some([[y11, y12], [y21, y22]])
}

fn admittance_to_s(y: [[Complex64; 2]; 2], z0: f64) -> Option<[[Complex64; 2]; 2]> {
    let [[y11, y12], [y21, y22]] = y;
    let a = ONE + y11 * z0;
    let d = ONE + y22 * z0;
    let den = a * d - y12 * y21 * z0 * z0;
    if den.norm().is_nan() || den.norm() <= SINGULAR_THRESHOLD {
        return None;
    }
    let s11 = ((ONE - y11 * z0) * d + y12 * y21 * z0 * z0) / den;
    let s22 = (a * (ONE - y22 * z0) + y12 * y21 * z0 * z0) / den;
    let s12 = -2.0 * y12 * z0 / den;
    let s21 = -2.0 * y21 * z0 / den;
    Some([[s11, s12], [s21, s22]])
}

/// Full scattering matrix at one frequency, referenced to `port_impedance`.
/// `None` marks a singular point.
pub fn s21_at(
    geometry: &DeviceGeometry,
    params: &ComParameters,
    frequency: f64,
) -> Result<Option<[[Complex64; 2]; 2]>> {
    let c = cascade(geometry, params, frequency)?;
    Ok(two_port_admittance(&c).and_then(|y| admittance_to_s(y, params.port_impedance)))
}

/// Uniform frequency grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPlan {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl SweepPlan {
    pub const DEFAULT_POINTS: usize = 2001;

    /// `points` samples over `center * [0.9, 1.1]`.
    pub fn around(center: f64, points: usize) -> Self {
        Self {
            start: 0.9 * center,
            stop: 1.1 * center,
            points,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.start > 0.0 && self.stop.is_finite()) {
            return Err(invalid("sweep start must be > 0"));
        }
        if self.points < 2 {
            return Err(invalid("sweep needs at least two points"));
        }
        if self.stop <= self.start {
            return Err(invalid("sweep stop must exceed start"));
        }
        Ok(())
    }

    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        let step = (self.stop - self.start) / (self.points - 1) as f64;
        (0..self.points).map(move |k| {
            if k + 1 == self.points {
                self.stop
            } else {
                self.start + k as f64 * step
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResponsePoint {
    pub frequency: f64,
    /// `None` where the boundary system was singular.
    pub s21: Option<Complex64>,
}

impl ResponsePoint {
    pub fn magnitude(&self) -> Option<f64> {
        self.s21.map(|s| s.norm())
    }

    pub fn db(&self) -> Option<f64> {
        self.magnitude().map(|m| 20.0 * m.log10())
    }
}

/// An S21 sweep with the inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyResponse {
    pub points: Vec<ResponsePoint>,
    pub geometry: DeviceGeometry,
    pub params: ComParameters,
}

impl FrequencyResponse {
    pub fn gaps(&self) -> usize {
        self.points.iter().filter(|p| p.s21.is_none()).count()
    }

    /// Magnitude at the sample closest to `frequency`.
    pub fn magnitude_near(&self, frequency: f64) -> Option<f64> {
        self.points
            .iter()
            .min_by(|a, b| {
                (a.frequency - frequency)
                    .abs()
                    .total_cmp(&(b.frequency - frequency).abs())
            })
            .and_then(ResponsePoint::magnitude)
    }

    pub fn peak_magnitude(&self) -> Option<f64> {
        self.points
            .iter()
            .filter_map(ResponsePoint::magnitude)
            .max_by(f64::total_cmp)
    }
}

/// S21 over a uniform grid. Singular frequencies are kept as gaps.
pub fn s21_sweep(
    geometry: &DeviceGeometry,
    params: &ComParameters,
    plan: &SweepPlan,
) -> Result<FrequencyResponse> {
    geometry.validate()?;
    params.validate()?;
    plan.validate()?;
    let points = plan
        .frequencies()
        .map(|f| {
            Ok(ResponsePoint {
                frequency: f,
                s21: s21_at(geometry, params, f)?.map(|s| s[1][0]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrequencyResponse {
        points,
        geometry: *geometry,
        params: *params,
    })
}

/// Formats like C's `%.9e`: nine decimals, signed two-digit exponent.
pub fn format_sci(value: f64) -> String {
    if value.is_nan() {
        return "nan".into();
    }
    if value.is_infinite() {
        return if value > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let s = format!("{value:.9e}");
    let (mantissa, exponent) = s.split_once('e').expect("exponent present");
    let exp: i32 = exponent.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mantissa}e{sign}{:02}", exp.abs())
}

/// Writes `f_hz,s21_re,s21_im,s21_db`, one row per point. Gaps are `nan`.
pub fn write_csv<W: Write>(response: &FrequencyResponse, mut out: W) -> io::Result<()> {
    writeln!(out, "f_hz,s21_re,s21_im,s21_db")?;
    for p in &response.points {
        let (re, im, db) = match p.s21 {
            Some(s) => (s.re, s.im, 20.0 * s.norm().log10()),
            None => (f64::NAN, f64::NAN, f64::NAN),
        };
        writeln!(
            out,
            "{},{},{},{}",
            format_sci(p.frequency),
            format_sci(re),
            format_sci(im),
            format_sci(db)
        )?;
    }
    Ok(())
}

/// Options for [`fpw_device_response`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FpwResponseOptions {
    pub points: usize,
    /// Add the viscous shear-layer attenuation to the base attenuation.
    pub viscous_attenuation: bool,
}

impl Default for FpwResponseOptions {
    fn default() -> Self {
        Self {
            points: SweepPlan::DEFAULT_POINTS,
            viscous_attenuation: true,
        }
    }
}

/// Runs the resonator model at the flexural-wave velocity of a loaded plate.
///
/// The sweep covers `f0 * [0.9, 1.1]` around `f0 = v / lambda`, with the
/// velocity held at its value for the design wavelength. When enabled, the
/// viscous layer adds an amplitude attenuation `k M_eta / (2 M_total)`: the
/// shear boundary layer has equal reactive and resistive parts, so its loss
/// term matches its mass term.
pub fn fpw_device_response(
    plate: &CompositePlate,
    loading: &LoadingState,
    geometry: &DeviceGeometry,
    params: &ComParameters,
    options: &FpwResponseOptions,
) -> Result<FrequencyResponse> {
    let solution = loaded_velocity(plate, loading, geometry.wavelength)?;
    let mut fpw = *params;
    fpw.free_velocity = solution.phase_velocity;
    if options.viscous_attenuation {
        let k = 2.0 * PI / geometry.wavelength;
        fpw.attenuation += k * solution.viscous_mass / (2.0 * solution.total_mass);
    }
    let plan = SweepPlan::around(solution.resonant_frequency, options.points);
    s21_sweep(geometry, &fpw, &plan)
}
