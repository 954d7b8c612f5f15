//! Truck configuration documents.
//!
//! A configuration is a TOML document with the sections `vehicle`, `engine`,
//! `torque_converter`, `transmission`, `driver` and `sim`. Maps are ordered
//! numeric lists. `docs/config.md` describes every key.
//!
//! Overrides use dotted keys (`driver.kp=2000`) and are applied to the
//! document text before it is deserialized, so error line numbers still point
//! into the document.

use std::path::Path;

use serde::Deserialize;
use toml_edit::{DocumentMut, Item};

use cyclesmooth_core::powertrain::{BsfcMap, Gear, PowertrainMaps, ShiftMap, TorqueConverterMap};
use cyclesmooth_core::{DriverGains, Model, SimConfig, TargetHold, VehicleParams};

use crate::error::{Error, Result};

/// The bundled medium-duty truck.
pub const DEFAULT_CONFIG: &str = include_str!("../../../configs/medium_duty_truck.toml");

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    vehicle: VehicleSection,
    engine: EngineSection,
    torque_converter: ConverterSection,
    transmission: TransmissionSection,
    driver: DriverSection,
    #[serde(default)]
    sim: SimSection,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct VehicleSection {
    mass_kg: f64,
    air_density_kg_m3: f64,
    drag_coeff: f64,
    frontal_area_m2: f64,
    rolling_coeff: f64,
    gravity_m_s2: f64,
    tire_radius_m: f64,
    driveline_efficiency: f64,
    engine_inertia_kg_m2: f64,
    accessory_power_w: f64,
    fuel_lower_heating_value_j_per_g: f64,
    #[serde(default = "default_idle")]
    idle_speed_rad_s: f64,
}

fn default_idle() -> f64 {
    62.8
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EngineSection {
    bsfc_torque_grid_nm: Vec<f64>,
    bsfc_speed_grid_rad_s: Vec<f64>,
    bsfc_g_per_kwh: Vec<Vec<f64>>,
    max_torque_speed_grid_rad_s: Vec<f64>,
    max_torque_nm: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConverterSection {
    speed_ratio: Vec<f64>,
    torque_ratio: Vec<f64>,
    capacity_factor: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TransmissionSection {
    ratios: Vec<f64>,
    pedal_grid: Vec<f64>,
    upshift_speed_m_s: Vec<Vec<f64>>,
    downshift_speed_m_s: Vec<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DriverSection {
    kp: f64,
    ki: f64,
    brake_scale: f64,
    torque_command_max_nm: f64,
    brake_force_max_n: f64,
    integrator_limit: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SimSection {
    step_dt_s: f64,
    log_every_n_steps: usize,
    initial_gear: u8,
    initial_engine_speed_rad_s: f64,
    initial_speed_m_s: f64,
    target_hold: TargetHold,
}

impl Default for SimSection {
    fn default() -> Self {
        let d = SimConfig::default();
        Self {
            step_dt_s: d.step_dt_s,
            log_every_n_steps: d.log_every_n_steps,
            initial_gear: d.initial_gear.0,
            initial_engine_speed_rad_s: d.initial_engine_speed_rad_s,
            initial_speed_m_s: d.initial_speed_m_s,
            target_hold: d.target_hold,
        }
    }
}

/// A `section.key=value` override.
#[derive(Debug, Clone, PartialEq)]
pub struct Override {
    pub key: String,
    pub value: String,
}

impl std::str::FromStr for Override {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (key, value) = s.split_once('=').ok_or_else(|| Error::Usage(format!(
            "override `{s}` is not of the form section.key=value"
        )))?;
        let key = key.trim();
        if key.split('.').count() != 2 || key.split('.').any(str::is_empty) {
            return Err(Error::Usage(format!(
                "override key `{key}` must be section.key"
            )));
        }
        Ok(Override {
            key: key.to_string(),
            value: value.trim().to_string(),
        })
    }
}

fn line_of_offset(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

/// 1-based line on which `section.key` is assigned, if it is present.
pub fn locate_key(text: &str, dotted: &str) -> Option<usize> {
    let (section, key) = dotted.split_once('.')?;
    let mut current = "";
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            current = name.trim();
            continue;
        }
        if current == section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return Some(i + 1);
                }
            }
        }
    }
    None
}

/// Dotted `section.key` assigned on 1-based `line`, if any.
fn key_at_line(text: &str, line: usize) -> Option<String> {
    let mut section = "";
    for raw in text.lines().take(line - 1) {
        let l = raw.trim();
        if let Some(name) = l.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim();
        }
    }
    let (key, _) = text.lines().nth(line - 1)?.split_once('=')?;
    let key = key.trim();
    if key.is_empty() || key.starts_with('[') || key.starts_with('#') {
        return None;
    }
    Some(if section.is_empty() {
        key.to_string()
    } else {
        format!("{section}.{key}")
    })
}

fn apply_overrides(text: &str, overrides: &[Override]) -> Result<String> {
    if overrides.is_empty() {
        return Ok(text.to_string());
    }
    let mut doc: DocumentMut = text.parse().map_err(|e: toml_edit::TomlError| Error::Config {
        key: None,
        line: e.span().map(|s| line_of_offset(text, s.start)),
        message: e.message().to_string(),
    })?;
    for o in overrides {
        let (section, key) = o.key.split_once('.').expect("validated by Override::from_str");
        let slot = doc
            .get_mut(section)
            .and_then(Item::as_table_like_mut)
            .and_then(|t| t.get_mut(key))
            .ok_or_else(|| Error::Usage(format!("override names unknown key `{}`", o.key)))?;
        let value: toml_edit::Value = o
            .value
            .parse()
            .unwrap_or_else(|_| toml_edit::Value::from(o.value.as_str()));
        let decor = slot.as_value().map(|v| v.decor().clone());
        let mut value = value;
        if let Some(decor) = decor {
            *value.decor_mut() = decor;
        }
        *slot = Item::Value(value);
    }
    Ok(doc.to_string())
}

fn config_key_for_map(map: &str) -> &'static str {
    match map {
        "bsfc" => "engine.bsfc_g_per_kwh",
        "max_torque" => "engine.max_torque_nm",
        "torque_converter" => "torque_converter.speed_ratio",
        "shift_map" => "transmission.ratios",
        _ => "",
    }
}

fn section_for_field(field: &str) -> &'static str {
    match field {
        "kp" | "ki" | "brake_scale" | "torque_command_max_nm" | "brake_force_max_n"
        | "integrator_limit" => "driver",
        "step_dt_s" | "log_every_n_steps" | "initial_gear" | "initial_engine_speed_rad_s"
        | "initial_speed_m_s" | "target_hold" => "sim",
        _ => "vehicle",
    }
}

fn model_error(text: &str, err: cyclesmooth_core::Error) -> Error {
    let key = match &err {
        cyclesmooth_core::Error::InvalidParameter { field, .. } => {
            Some(format!("{}.{field}", section_for_field(field)))
        }
        cyclesmooth_core::Error::InvalidMap { map, .. } => {
            Some(config_key_for_map(map).to_string()).filter(|k| !k.is_empty())
        }
        cyclesmooth_core::Error::InvalidGear { .. } => Some("sim.initial_gear".to_string()),
        _ => None,
    };
    let line = key.as_deref().and_then(|k| locate_key(text, k));
    Error::Config {
        key,
        line,
        message: err.to_string(),
    }
}

/// Parses a configuration document and applies `overrides`.
pub fn parse_config(text: &str, overrides: &[Override]) -> Result<Model> {
    let text = apply_overrides(text, overrides)?;
    let file: ConfigFile = toml::from_str(&text).map_err(|e| {
        let line = e.span().map(|s| line_of_offset(&text, s.start));
        let key = line.and_then(|l| key_at_line(&text, l));
        Error::Config {
            key,
            line,
            message: e.message().to_string(),
        }
    })?;
    build_model(file).map_err(|e| model_error(&text, e))
}

fn build_model(f: ConfigFile) -> cyclesmooth_core::Result<Model> {
    let v = f.vehicle;
    let params = VehicleParams {
        mass_kg: v.mass_kg,
        air_density_kg_m3: v.air_density_kg_m3,
        drag_coeff: v.drag_coeff,
        frontal_area_m2: v.frontal_area_m2,
        rolling_coeff: v.rolling_coeff,
        gravity_m_s2: v.gravity_m_s2,
        tire_radius_m: v.tire_radius_m,
        driveline_efficiency: v.driveline_efficiency,
        engine_inertia_kg_m2: v.engine_inertia_kg_m2,
        accessory_power_w: v.accessory_power_w,
        fuel_lower_heating_value_j_per_g: v.fuel_lower_heating_value_j_per_g,
        idle_speed_rad_s: v.idle_speed_rad_s,
    };
    let e = f.engine;
    let bsfc = BsfcMap::new(
        e.bsfc_torque_grid_nm,
        e.bsfc_speed_grid_rad_s,
        &e.bsfc_g_per_kwh,
        e.max_torque_speed_grid_rad_s,
        e.max_torque_nm,
    )?;
    let c = f.torque_converter;
    let converter = TorqueConverterMap::new(c.speed_ratio, c.torque_ratio, c.capacity_factor)?;
    let t = f.transmission;
    let shift = ShiftMap::new(t.ratios, t.pedal_grid, t.upshift_speed_m_s, t.downshift_speed_m_s)?;
    let d = f.driver;
    let gains = DriverGains {
        kp: d.kp,
        ki: d.ki,
        brake_scale: d.brake_scale,
        torque_command_max_nm: d.torque_command_max_nm,
        brake_force_max_n: d.brake_force_max_n,
        integrator_limit: d.integrator_limit,
    };
    let s = f.sim;
    let sim = SimConfig {
        step_dt_s: s.step_dt_s,
        log_every_n_steps: s.log_every_n_steps,
        initial_gear: Gear(s.initial_gear),
        initial_engine_speed_rad_s: s.initial_engine_speed_rad_s,
        initial_speed_m_s: s.initial_speed_m_s,
        target_hold: s.target_hold,
    };
    let model = Model {
        params,
        maps: PowertrainMaps {
            converter,
            shift,
            bsfc,
        },
        gains,
        sim,
    };
    model.validate()?;
    Ok(model)
}

/// Reads and parses a configuration file.
pub fn load_config(path: &Path, overrides: &[Override]) -> Result<Model> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config(&text, overrides).map_err(|e| e.in_file(path))
}

/// The bundled truck with `overrides` applied.
pub fn default_model(overrides: &[Override]) -> Result<Model> {
    parse_config(DEFAULT_CONFIG, overrides)
}
