use std::f64::consts::PI;

use num_complex::Complex64;

use super::matrix::{MixedMatrix3, TransmissionMatrix2};
use super::{ComParameters, DeviceGeometry};
use crate::error::{invalid, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// Grating-to-IDT gap `(1/8 + n/2) lambda` that places both transducers on
/// the strong-coupling positions of the cavity standing wave.
pub fn design_spacing(n: i64, wavelength: f64) -> Result<f64> {
    if n < 0 {
        return Err(invalid("spacing index n must be >= 0"));
    }
    if !(wavelength.is_finite() && wavelength > 0.0) {
        return Err(invalid("wavelength must be > 0"));
    }
    Ok((0.125 + n as f64 / 2.0) * wavelength)
}

fn wavenumber(frequency: f64, params: &ComParameters) -> Result<f64> {
    params.validate()?;
    if !(frequency.is_finite() && frequency > 0.0) {
        return Err(invalid("frequency must be > 0"));
    }
    Ok(2.0 * PI * frequency / params.free_velocity)
}

/// Complex propagation constant `i beta + alpha`.
fn propagation(frequency: f64, params: &ComParameters) -> Result<Complex64> {
    Ok(Complex64::new(
        params.attenuation,
        wavenumber(frequency, params)?,
    ))
}

/// Free propagation over `length`: `diag(e^{gamma L}, e^{-gamma L})`.
pub fn spacing_matrix(
    frequency: f64,
    length: f64,
    params: &ComParameters,
) -> Result<TransmissionMatrix2> {
    if !(length.is_finite() && length >= 0.0) {
        return Err(invalid("spacing length must be >= 0"));
    }
    let phase = propagation(frequency, params)? * length;
    Ok(TransmissionMatrix2::diagonal(phase.exp(), (-phase).exp()))
}

/// Which side of the cavity a grating sits on. Its reference plane is always
/// the edge facing the transducers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GratingSide {
    Left,
    Right,
}

/// `cosh(z)` and `sinh(z)/s` for `z = s L`, stable near `s = 0`.
fn cosh_sinhc(s: Complex64, length: f64) -> (Complex64, Complex64) {
    let z = s * length;
    if z.norm() < 1e-6 {
        let z2 = z * z;
        (1.0 + z2 / 2.0, length * (1.0 + z2 / 6.0))
    } else {
        (z.cosh(), z.sinh() / s)
    }
}

/// Coupled-mode transfer matrix of a uniform strip grating.
///
/// Inside the grating the envelopes obey
/// `R' = -i delta R + i kappa S`, `S' = i delta S - i kappa R`
/// with `kappa = 2 r_s / lambda` and complex detuning
/// `delta = beta - 2 pi / lambda - i alpha`. The solution is hyperbolic for
/// `|delta| < kappa` (the stopband) and oscillatory outside it.
pub fn grating_matrix(
    frequency: f64,
    geometry: &DeviceGeometry,
    params: &ComParameters,
    side: GratingSide,
) -> Result<TransmissionMatrix2> {
    geometry.validate()?;
    if geometry.grating_strips == 0 {
        return Err(invalid("grating needs at least one strip"));
    }
    let beta = wavenumber(frequency, params)?;
    let bragg = 2.0 * PI / geometry.wavelength;
    let length = geometry.grating_length();
    let delta = Complex64::new(beta - bragg, -params.attenuation);
    let kappa = 2.0 * params.strip_reflectivity / geometry.wavelength;

    let s = (kappa * kappa - delta * delta).sqrt();
    let (ch, sh) = cosh_sinhc(s, length);
    // inverse of the envelope transfer matrix (unit determinant)
    let envelope_inv = TransmissionMatrix2::new([
        [ch + I * delta * sh, -I * kappa * sh],
        [I * kappa * sh, ch - I * delta * sh],
    ]);
    let carrier = Complex64::new(0.0, bragg * length).exp();
    let core = envelope_inv * TransmissionMatrix2::diagonal(carrier, carrier.inv());

    let half = Complex64::new(0.0, params.reflection_phase / 2.0).exp();
    let reference = TransmissionMatrix2::diagonal(half.inv(), half);
    let reference_inv = TransmissionMatrix2::diagonal(half, half.inv());
    let left = reference_inv * core * reference;

    match side {
        GratingSide::Left => Ok(left),
        GratingSide::Right => Ok(left
            .mirrored()
            .expect("grating matrix has unit determinant")),
    }
}

/// Normalised array factor of a uniform IDT,
/// `sin(X) / X` with `X = N_p pi (f - f0) / f0`.
pub fn array_factor(frequency: f64, center: f64, pairs: u32) -> f64 {
    let x = f64::from(pairs) * PI * (frequency - center) / center;
    if x.abs() < 1e-8 {
        1.0 - x * x / 6.0
    } else {
        x.sin() / x
    }
}

/// Acoustic susceptance shape `(sin 2X - 2X) / (2 X^2)` paired with the
/// `sinc^2` radiation conductance.
fn susceptance_shape(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        -2.0 * x / 3.0 + 2.0 * x.powi(3) / 15.0
    } else {
        ((2.0 * x).sin() - 2.0 * x) / (2.0 * x * x)
    }
}

/// Transversal (reflection-free) IDT as a mixed 3x3 matrix.
///
/// The transducer launches `t V` into both directions from its centre, with
/// `t = -i k N_p sqrt(W) AF(f) e^{-gamma L / 2}`. Reciprocity fixes the
/// current row at `-2 t`, and the input admittance is
/// `G_a + i (B_a + omega C_T)` with `G_a = 2 |t|^2` for a lossless path.
pub fn idt_matrix(
    frequency: f64,
    geometry: &DeviceGeometry,
    params: &ComParameters,
) -> Result<MixedMatrix3> {
    geometry.validate()?;
    let gamma = propagation(frequency, params)?;
    let pairs = f64::from(geometry.idt_pairs);
    let length = geometry.idt_length();
    let center = params.free_velocity / geometry.wavelength;
    let x = pairs * PI * (frequency - center) / center;
    let af = array_factor(frequency, center, geometry.idt_pairs);

    let amplitude = params.transduction_strength * pairs * geometry.overlap_wavelengths.sqrt();
    let forward = (gamma * length).exp();
    let backward = (-gamma * length).exp();
    let t = -I * amplitude * af * (-gamma * length / 2.0).exp();

    let peak_conductance = 2.0 * amplitude * amplitude;
    let conductance = peak_conductance * af * af;
    let susceptance = peak_conductance * susceptance_shape(x);
    let capacitance = pairs * params.static_capacitance_per_pair;
    let admittance = Complex64::new(
        conductance,
        susceptance + 2.0 * PI * frequency * capacitance,
    );

    let p31 = -2.0 * t;
    let zero = Complex64::new(0.0, 0.0);
    Ok(MixedMatrix3 {
        m: [
            [forward, zero, -forward * t],
            [zero, backward, t],
            [p31 * forward, p31, admittance - p31 * forward * t],
        ],
    })
}
