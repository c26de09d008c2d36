//! Plain-text input formats.
//!
//! Device configs are line oriented: `[layer]`, `[geometry]`, `[com]` and
//! `[override]` sections holding `key = value` lines, `#` comments. Each
//! `[layer]` section appends one layer to the stack, bottom first. Values
//! are SI; densities may carry a `g/cm3` suffix.
//!
//! ```text
//! [layer]
//! name = SiNx
//! thickness = 1.2e-6
//! young_modulus = 3.85e11
//! poisson_ratio = 0.27
//! density = 3.1 g/cm3
//!
//! [geometry]
//! wavelength = 40e-6
//! spacing_index = 0
//! ```
//!
//! Liquid libraries hold one `name density viscosity` entry per line, and
//! calibration point files one `density frequency` pair per line.

use std::collections::HashSet;

use crate::com::{design_spacing, ComParameters, DeviceGeometry};
use crate::error::{FpwError, Result};
use crate::plate::{CompositePlate, MaterialLayer, PlateOverrides};
use crate::sensing::LiquidSample;

/// Bundled configuration of the reference PZT/SiNx device.
pub const PAPER_DEVICE: &str = include_str!("../data/paper_device.cfg");
/// Bundled library with IPA, water, saline and glycerol.
pub const STANDARD_LIQUIDS: &str = include_str!("../data/liquids.txt");

#[derive(Debug, Clone, PartialEq)]
pub struct DeviceConfig {
    pub layers: Vec<MaterialLayer>,
    pub geometry: DeviceGeometry,
    /// Index `n` of the `(1/8 + n/2) lambda` gap when the gap was given that way.
    pub spacing_index: Option<u32>,
    pub com: ComParameters,
    pub overrides: PlateOverrides,
}

impl DeviceConfig {
    pub fn plate(&self) -> Result<CompositePlate> {
        CompositePlate::new(self.layers.clone())?.with_overrides(self.overrides)
    }

    pub fn paper_device() -> Self {
        parse_device_config(PAPER_DEVICE).expect("bundled device config is valid")
    }
}

fn parse_error(line: usize, message: impl Into<String>) -> FpwError {
    FpwError::Parse {
        line,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#')
        .map_or(line, |(before, _)| before)
        .trim()
}

fn parse_number(value: &str, line: usize) -> Result<f64> {
    let v: f64 = value
        .trim()
        .parse()
        .map_err(|_| parse_error(line, format!("malformed number '{value}'")))?;
    if !v.is_finite() {
        return Err(parse_error(line, format!("non-finite number '{value}'")));
    }
    Ok(v)
}

/// Density in kg/m^3, accepting a trailing `g/cm3` or `kg/m3` unit.
pub fn parse_density(value: &str, line: usize) -> Result<f64> {
    let value = value.trim();
    if let Some(number) = value.strip_suffix("g/cm3").filter(|n| !n.ends_with('k')) {
        return Ok(parse_number(number, line)? * 1e3);
    }
    if let Some(number) = value.strip_suffix("kg/m3") {
        return parse_number(number, line);
    }
    parse_number(value, line)
}

fn parse_count(value: &str, line: usize) -> Result<u32> {
    value.trim().parse().map_err(|_| {
        parse_error(
            line,
            format!("expected a non-negative integer, got '{value}'"),
        )
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Section {
    Layer,
    Geometry,
    Com,
    Override,
}

#[derive(Default)]
struct LayerDraft {
    start_line: usize,
    name: Option<String>,
    thickness: Option<f64>,
    young_modulus: Option<f64>,
    poisson_ratio: Option<f64>,
    density: Option<f64>,
}

impl LayerDraft {
    fn finish(self, index: usize) -> Result<MaterialLayer> {
        let line = self.start_line;
        let missing =
            |key: &str| parse_error(line, format!("[layer] missing required key '{key}'"));
        let layer = MaterialLayer {
            name: self.name.unwrap_or_else(|| format!("layer{}", index + 1)),
            thickness: self.thickness.ok_or_else(|| missing("thickness"))?,
            young_modulus: self.young_modulus.ok_or_else(|| missing("young_modulus"))?,
            poisson_ratio: self.poisson_ratio.ok_or_else(|| missing("poisson_ratio"))?,
            density: self.density.ok_or_else(|| missing("density"))?,
        };
        layer
            .validate()
            .map_err(|e| parse_error(line, e.to_string()))?;
        Ok(layer)
    }
}

/// Parses and validates a device config.
pub fn parse_device_config(text: &str) -> Result<DeviceConfig> {
    let mut section: Option<Section> = None;
    let mut seen: HashSet<(Section, String)> = HashSet::new();
    let mut layers = Vec::new();
    let mut draft: Option<LayerDraft> = None;

    let mut geometry = DeviceGeometry::reference(40e-6);
    let mut wavelength: Option<f64> = None;
    let mut spacing_index: Option<u32> = None;
    let mut explicit_gap: Option<(f64, usize)> = None;
    let mut geometry_line = 0;
    let mut com = ComParameters::default();
    let mut com_line = 0;
    let mut overrides = PlateOverrides::default();
    let mut override_line = 0;

    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            let next = match name.trim() {
                "layer" => Section::Layer,
                "geometry" => Section::Geometry,
                "com" => Section::Com,
                "override" => Section::Override,
                other => return Err(parse_error(line_no, format!("unknown section [{other}]"))),
            };
            if let Some(done) = draft.take() {
                layers.push(done.finish(layers.len())?);
            }
            if next == Section::Layer {
                seen.retain(|(s, _)| *s != Section::Layer);
                draft = Some(LayerDraft {
                    start_line: line_no,
                    ..LayerDraft::default()
                });
            } else if seen.iter().any(|(s, k)| *s == next && k.is_empty()) {
                return Err(parse_error(
                    line_no,
                    format!("section [{}] repeated", name.trim()),
                ));
            } else {
                seen.insert((next, String::new()));
            }
            match next {
                Section::Geometry => geometry_line = line_no,
                Section::Com => com_line = line_no,
                Section::Override => override_line = line_no,
                Section::Layer => {}
            }
            section = Some(next);
            continue;
        }

        let Some((key, value)) = line.split_once('=') else {
            return Err(parse_error(
                line_no,
                format!("expected 'key = value', got '{line}'"),
            ));
        };
        let key = key.trim();
        let value = value.trim();
        let Some(current) = section else {
            return Err(parse_error(
                line_no,
                format!("key '{key}' outside of any section"),
            ));
        };
        if !seen.insert((current, key.to_string())) {
            return Err(parse_error(line_no, format!("duplicate key '{key}'")));
        }
        let unknown = || parse_error(line_no, format!("unknown key '{key}'"));

        match current {
            Section::Layer => {
                let d = draft.as_mut().expect("layer section has a draft");
                match key {
                    "name" => d.name = Some(value.to_string()),
                    "thickness" => d.thickness = Some(parse_number(value, line_no)?),
                    "young_modulus" => d.young_modulus = Some(parse_number(value, line_no)?),
                    "poisson_ratio" => d.poisson_ratio = Some(parse_number(value, line_no)?),
                    "density" => d.density = Some(parse_density(value, line_no)?),
                    _ => return Err(unknown()),
                }
            }
            Section::Geometry => match key {
                "wavelength" => wavelength = Some(parse_number(value, line_no)?),
                "idt_pairs" => geometry.idt_pairs = parse_count(value, line_no)?,
                "grating_strips" => geometry.grating_strips = parse_count(value, line_no)?,
                "overlap" => geometry.overlap_wavelengths = parse_number(value, line_no)?,
                "separation" => geometry.separation_wavelengths = parse_number(value, line_no)?,
                "spacing_index" => spacing_index = Some(parse_count(value, line_no)?),
                "grating_gap" => explicit_gap = Some((parse_number(value, line_no)?, line_no)),
                "metallization_ratio" => {
                    geometry.metallization_ratio = parse_number(value, line_no)?
                }
                _ => return Err(unknown()),
            },
            Section::Com => match key {
                "free_velocity" => com.free_velocity = parse_number(value, line_no)?,
                "strip_reflectivity" => com.strip_reflectivity = parse_number(value, line_no)?,
                "reflection_phase_deg" => {
                    com.reflection_phase = parse_number(value, line_no)?.to_radians()
                }
                "transduction_strength" => {
                    com.transduction_strength = parse_number(value, line_no)?
                }
                "static_capacitance_per_pair" => {
                    com.static_capacitance_per_pair = parse_number(value, line_no)?
                }
                "attenuation" => com.attenuation = parse_number(value, line_no)?,
                "port_impedance" => com.port_impedance = parse_number(value, line_no)?,
                _ => return Err(unknown()),
            },
            Section::Override => {
                let v = parse_number(value, line_no)?;
                match key {
                    "young_modulus" => overrides.young_modulus = Some(v),
                    "poisson_ratio" => overrides.poisson_ratio = Some(v),
                    "plate_modulus" => overrides.plate_modulus = Some(v),
                    "mass_per_area" => overrides.mass_per_area = Some(v),
                    "bending_term" => overrides.bending_term = Some(v),
                    _ => return Err(unknown()),
                }
            }
        }
    }
    if let Some(done) = draft.take() {
        layers.push(done.finish(layers.len())?);
    }

    let last_line = text.lines().count().max(1);
    geometry.wavelength = wavelength.ok_or_else(|| {
        parse_error(
            if geometry_line == 0 {
                last_line
            } else {
                geometry_line
            },
            "[geometry] missing required key 'wavelength'",
        )
    })?;
    geometry.grating_gap = match (spacing_index, explicit_gap) {
        (Some(_), Some((_, line))) => {
            return Err(parse_error(
                line,
                "give either grating_gap or spacing_index, not both",
            ))
        }
        (_, Some((gap, _))) => gap,
        (n, None) => design_spacing(i64::from(n.unwrap_or(0)), geometry.wavelength)
            .map_err(|e| parse_error(geometry_line, e.to_string()))?,
    };
    geometry
        .validate()
        .map_err(|e| parse_error(geometry_line, e.to_string()))?;
    com.validate()
        .map_err(|e| parse_error(com_line, e.to_string()))?;
    if !overrides.is_empty() && !layers.is_empty() {
        CompositePlate::new(layers.clone())
            .and_then(|p| p.with_overrides(overrides))
            .map_err(|e| parse_error(override_line, e.to_string()))?;
    }

    Ok(DeviceConfig {
        layers,
        geometry,
        spacing_index: if explicit_gap.is_some() {
            None
        } else {
            Some(spacing_index.unwrap_or(0))
        },
        com,
        overrides,
    })
}

/// Parses `name density viscosity` lines.
pub fn parse_liquid_library(text: &str) -> Result<Vec<LiquidSample>> {
    let mut liquids: Vec<LiquidSample> = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [name, density, viscosity] = fields[..] else {
            return Err(parse_error(
                line_no,
                "expected 'name density_kg_m3 viscosity_pa_s'",
            ));
        };
        if liquids.iter().any(|l| l.name == name) {
            return Err(parse_error(line_no, format!("duplicate liquid '{name}'")));
        }
        let sample = LiquidSample::new(
            name,
            parse_density(density, line_no)?,
            parse_number(viscosity, line_no)?,
        )
        .map_err(|e| parse_error(line_no, e.to_string()))?;
        liquids.push(sample);
    }
    Ok(liquids)
}

/// Parses `density frequency_hz` pairs separated by whitespace or commas.
/// A `g/cm3` unit may follow the density, attached or as its own token.
pub fn parse_calibration_points(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut points = Vec::new();
    for (index, raw) in text.lines().enumerate() {
        let line_no = index + 1;
        let line = strip_comment(raw);
        if line.is_empty() {
            continue;
        }
        let mut tokens: Vec<String> = line
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(str::to_string)
            .collect();
        if tokens.len() == 3 && (tokens[1] == "g/cm3" || tokens[1] == "kg/m3") {
            let unit = tokens.remove(1);
            tokens[0].push_str(&unit);
        }
        let [density, frequency] = &tokens[..] else {
            return Err(parse_error(line_no, "expected 'density frequency_hz'"));
        };
        let density = parse_density(density, line_no)?;
        let frequency = parse_number(frequency, line_no)?;
        if density <= 0.0 || frequency <= 0.0 {
            return Err(parse_error(line_no, "density and frequency must be > 0"));
        }
        points.push((density, frequency));
    }
    Ok(points)
}
