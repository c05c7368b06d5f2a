//! Experiment configuration and its flat `key = value` file format.
//!
//! One assignment per line; `#` starts a comment; blank lines are ignored.
//! Vectors are written as three comma-separated numbers. Keys that are not
//! present keep their defaults.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use sha2::{Digest, Sha256};

use crate::assembly::AssemblyParams;
use crate::error::{ConfigError, Error, Result};
use crate::geometry::{SimBox, Vec3};
use crate::physics::Strategy;

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub bounds: SimBox,
    pub n_molecules: usize,
    pub molecule_radius: f64,
    pub molecule_mass: f64,
    /// Per-component standard deviation of initial velocities (μm/min).
    pub sigma_v: f64,
    /// Per-frame Gaussian velocity increment (μm/min); 0 disables it.
    pub velocity_kick: f64,
    pub dt: f64,
    pub t_max: f64,
    pub strategy: Strategy,
    pub assembly: AssemblyParams,
    pub transmitter_center: Vec3,
    pub transmitter_radius: f64,
    pub receiver_center: Vec3,
    pub receiver_radius: f64,
    pub seed: u64,
    pub trace_interval: f64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            bounds: SimBox::new(Vec3::ZERO, Vec3::new(100.0, 30.0, 30.0)),
            n_molecules: 300,
            molecule_radius: 1.0,
            molecule_mass: 1.0,
            sigma_v: 40.0,
            velocity_kick: 0.0,
            dt: 0.01,
            t_max: 500.0,
            strategy: Strategy::Pic,
            assembly: AssemblyParams::default(),
            transmitter_center: Vec3::new(5.0, 15.0, 15.0),
            transmitter_radius: 5.0,
            receiver_center: Vec3::new(95.0, 15.0, 15.0),
            receiver_radius: 5.0,
            seed: 1,
            trace_interval: 0.1,
        }
    }
}

const KEYS: &[&str] = &[
    "box_min",
    "box_max",
    "n_molecules",
    "molecule_radius",
    "molecule_mass",
    "sigma_v",
    "velocity_kick",
    "dt",
    "t_max",
    "strategy",
    "field_intensity",
    "enzyme_concentration",
    "angle_range",
    "field_gain",
    "progress_in_zero_field",
    "capture_gap",
    "transmitter_center",
    "transmitter_radius",
    "receiver_center",
    "receiver_radius",
    "seed",
    "trace_interval",
];

fn parse_vec3(s: &str) -> Result<Vec3, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        return Err(format!("expected three comma-separated numbers, got '{s}'"));
    }
    let mut out = [0.0; 3];
    for (slot, part) in out.iter_mut().zip(&parts) {
        *slot = part.parse::<f64>().map_err(|e| format!("'{part}': {e}"))?;
    }
    Ok(Vec3::new(out[0], out[1], out[2]))
}

fn parse_bool(s: &str) -> Result<bool, String> {
    match s.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        other => Err(format!("expected a boolean, got '{other}'")),
    }
}

fn parse_num<T: FromStr>(s: &str) -> Result<T, String>
where
    T::Err: std::fmt::Display,
{
    s.parse::<T>().map_err(|e| format!("'{s}': {e}"))
}

impl SimConfig {
    /// Parses configuration text, collecting every problem before failing.
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cfg = SimConfig::default();
        let mut problems = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                problems.push(format!("line {}: expected 'key = value', got '{line}'", lineno + 1));
                continue;
            };
            let (key, value) = (key.trim(), value.trim());
            if !seen.insert(key.to_string()) {
                problems.push(format!("line {}: duplicate key '{key}'", lineno + 1));
                continue;
            }
            if let Err(e) = cfg.set(key, value) {
                problems.push(format!("line {}: {key}: {e}", lineno + 1));
            }
        }
        problems.extend(cfg.violations());
        if problems.is_empty() {
            Ok(cfg)
        } else {
            Err(ConfigError { violations: problems })
        }
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(SimConfig::parse(&text)?)
    }

    /// Assigns one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let a = &mut self.assembly;
        match key {
            "box_min" => self.bounds.min_corner = parse_vec3(value)?,
            "box_max" => self.bounds.max_corner = parse_vec3(value)?,
            "n_molecules" => self.n_molecules = parse_num(value)?,
            "molecule_radius" => self.molecule_radius = parse_num(value)?,
            "molecule_mass" => self.molecule_mass = parse_num(value)?,
            "sigma_v" => self.sigma_v = parse_num(value)?,
            "velocity_kick" => self.velocity_kick = parse_num(value)?,
            "dt" => self.dt = parse_num(value)?,
            "t_max" => self.t_max = parse_num(value)?,
            "strategy" => self.strategy = value.parse()?,
            "field_intensity" => a.field_intensity = parse_num(value)?,
            "enzyme_concentration" => a.enzyme_concentration = parse_num(value)?,
            "angle_range" => a.angle_range = parse_num(value)?,
            "field_gain" => a.field_gain = parse_num(value)?,
            "progress_in_zero_field" => a.progress_in_zero_field = parse_bool(value)?,
            "capture_gap" => a.capture_gap = parse_num(value)?,
            "transmitter_center" => self.transmitter_center = parse_vec3(value)?,
            "transmitter_radius" => self.transmitter_radius = parse_num(value)?,
            "receiver_center" => self.receiver_center = parse_vec3(value)?,
            "receiver_radius" => self.receiver_radius = parse_num(value)?,
            "seed" => self.seed = parse_num(value)?,
            "trace_interval" => self.trace_interval = parse_num(value)?,
            _ => return Err(format!("unknown key (expected one of: {})", KEYS.join(", "))),
        }
        Ok(())
    }

    /// Canonical text form: every key, fixed order, shortest round-trip numbers.
    pub fn to_config_text(&self) -> String {
        let a = &self.assembly;
        let mut s = String::new();
        let mut put = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        put("box_min", self.bounds.min_corner.to_string());
        put("box_max", self.bounds.max_corner.to_string());
        put("n_molecules", self.n_molecules.to_string());
        put("molecule_radius", self.molecule_radius.to_string());
        put("molecule_mass", self.molecule_mass.to_string());
        put("sigma_v", self.sigma_v.to_string());
        put("velocity_kick", self.velocity_kick.to_string());
        put("dt", self.dt.to_string());
        put("t_max", self.t_max.to_string());
        put("strategy", self.strategy.to_string());
        put("field_intensity", a.field_intensity.to_string());
        put("enzyme_concentration", a.enzyme_concentration.to_string());
        put("angle_range", a.angle_range.to_string());
        put("field_gain", a.field_gain.to_string());
        put("progress_in_zero_field", a.progress_in_zero_field.to_string());
        put("capture_gap", a.capture_gap.to_string());
        put("transmitter_center", self.transmitter_center.to_string());
        put("transmitter_radius", self.transmitter_radius.to_string());
        put("receiver_center", self.receiver_center.to_string());
        put("receiver_radius", self.receiver_radius.to_string());
        put("seed", self.seed.to_string());
        put("trace_interval", self.trace_interval.to_string());
        s
    }

    /// SHA-256 of the canonical text, hex encoded.
    pub fn hash(&self) -> String {
        hex::encode(Sha256::digest(self.to_config_text().as_bytes()))
    }

    /// Unit vector from transmitter to receiver.
    pub fn axis_direction(&self) -> Option<Vec3> {
        (self.receiver_center - self.transmitter_center).normalized()
    }

    /// Half-width of the box perpendicular to the dominant axis direction.
    pub fn lateral_half_width(&self) -> f64 {
        let axis = self.axis_direction().unwrap_or(Vec3::UNIT_X);
        let dominant = (0..3)
            .max_by(|&i, &j| axis[i].abs().total_cmp(&axis[j].abs()))
            .unwrap_or(0);
        let extent = self.bounds.extent();
        (0..3)
            .filter(|&k| k != dominant)
            .map(|k| 0.5 * extent[k])
            .fold(f64::INFINITY, f64::min)
    }

    /// Every violated invariant, in a stable order.
    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let pos = |name: &str, v: f64, out: &mut Vec<String>| {
            if !(v > 0.0 && v.is_finite()) {
                out.push(format!("{name} must be finite and > 0 (got {v})"));
            }
        };
        if !self.bounds.is_valid() {
            out.push(format!(
                "box_min ({}) must be below box_max ({}) in every component",
                self.bounds.min_corner, self.bounds.max_corner
            ));
        }
        if self.n_molecules == 0 {
            out.push("n_molecules must be at least 1".into());
        }
        pos("molecule_radius", self.molecule_radius, &mut out);
        pos("molecule_mass", self.molecule_mass, &mut out);
        pos("sigma_v", self.sigma_v, &mut out);
        if !(self.velocity_kick >= 0.0 && self.velocity_kick.is_finite()) {
            out.push(format!(
                "velocity_kick must be finite and >= 0 (got {})",
                self.velocity_kick
            ));
        }
        pos("dt", self.dt, &mut out);
        pos("t_max", self.t_max, &mut out);
        pos("trace_interval", self.trace_interval, &mut out);
        pos("transmitter_radius", self.transmitter_radius, &mut out);
        pos("receiver_radius", self.receiver_radius, &mut out);
        out.extend(self.assembly.violations());

        if self.bounds.is_valid() {
            for (name, c, r) in [
                ("transmitter", self.transmitter_center, self.transmitter_radius),
                ("receiver", self.receiver_center, self.receiver_radius),
            ] {
                if !self.bounds.contains_sphere(c, r, 1e-9) {
                    out.push(format!(
                        "{name} sphere (centre {c}, radius {r}) must lie inside the box"
                    ));
                }
            }
        }
        let gap =
            self.transmitter_center.distance(self.receiver_center) - self.transmitter_radius - self.receiver_radius;
        if gap < -1e-12 {
            out.push(format!("transmitter and receiver overlap by {} μm", -gap));
        }
        if self.axis_direction().is_none() {
            out.push("transmitter and receiver centres must differ".into());
        }
        if self.molecule_radius >= self.transmitter_radius.min(self.receiver_radius) {
            out.push(format!(
                "molecule_radius ({}) must be smaller than both anchor radii",
                self.molecule_radius
            ));
        }
        out
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let violations = self.violations();
        if violations.is_empty() {
            Ok(())
        } else {
            Err(ConfigError { violations })
        }
    }
}
