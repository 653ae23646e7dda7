//! Scenario files: strict JSON, frequencies in MHz (ω/2π).

use std::f64::consts::PI;
use std::path::Path;

use serde::{Deserialize, Serialize};

use geogate::device::{mhz, DeviceParams};
use geogate::geo::{GateName, Profile, Shape};
use geogate::open_system::{self as os, DeviceRun, FidelityNumerics, NoiseParams};
use geogate::robustness::{linspace, Scheme, TraceMode};

use crate::error::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Synth,
    Simulate,
    Scan,
    Master,
    Report,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Synth => "synth",
            Kind::Simulate => "simulate",
            Kind::Scan => "scan",
            Kind::Master => "master",
            Kind::Report => "report",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SchemeName {
    Geometric,
    Dynamical,
}

impl SchemeName {
    pub fn core(self) -> Scheme {
        match self {
            SchemeName::Geometric => Scheme::Geometric,
            SchemeName::Dynamical => Scheme::Dynamical,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            SchemeName::Geometric => "geometric",
            SchemeName::Dynamical => "dynamical",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeName {
    Square,
    Sine,
}

impl ShapeName {
    pub fn core(self) -> Shape {
        match self {
            ShapeName::Square => Shape::Square,
            ShapeName::Sine => Shape::Sine,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ShapeName::Square => "square",
            ShapeName::Sine => "sine",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceName {
    Magnitude,
    RealPart,
}

/// `H`, `S`, `T` or the two-logical-qubit `CP`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Target {
    Single(GateName),
    Cp,
}

impl Target {
    pub fn name(self) -> String {
        match self {
            Target::Single(g) => g.to_string(),
            Target::Cp => "CP".into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl Range {
    fn values(&self, key: &str) -> Result<Vec<f64>, CliError> {
        if self.n == 0 || !self.min.is_finite() || !self.max.is_finite() || self.max < self.min {
            return Err(CliError::config(format!("{key}: need finite min <= max and n >= 1")));
        }
        Ok(linspace(self.min, self.max, self.n))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProfileConfig {
    /// Omitted: both shapes where a command supports it, square otherwise.
    pub shape: Option<ShapeName>,
    /// Peak Rabi frequency Ω/2π; default makes Ω = 1 rad/µs.
    pub peak_mhz: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ErrorConfig {
    pub epsilon: f64,
    pub eta: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub epsilon: Option<Range>,
    pub eta: Option<Range>,
    pub trace: Option<TraceName>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DeviceConfig {
    pub g_1a_mhz: Option<f64>,
    pub g_a2_mhz: Option<f64>,
    pub delta1_mhz: Option<f64>,
    pub delta2_mhz: Option<f64>,
    pub alpha1_mhz: Option<f64>,
    pub alpha2_mhz: Option<f64>,
    pub levels_transmon: Option<usize>,
    pub levels_resonator: Option<usize>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub drift1_mhz: Option<f64>,
    pub drift2_mhz: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub kappa_minus_mhz: Option<f64>,
    pub kappa_z_mhz: Option<f64>,
    pub kappa_a_mhz: Option<f64>,
    pub kappa_b_mhz: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub max_step_us: Option<f64>,
    pub points_single: Option<usize>,
    pub points_two: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    /// Sets `κ₋ = κ_z` on the transmons.
    pub kappa_mhz: Option<Range>,
    pub drift1_mhz: Option<Range>,
    /// Together with `drift1_mhz`, a two-qubit drift grid.
    pub drift2_mhz: Option<Range>,
}

/// Raw scenario file.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Config {
    pub kind: Option<Kind>,
    pub gate: Option<String>,
    pub gates: Option<Vec<String>>,
    pub scheme: Option<SchemeName>,
    pub schemes: Option<Vec<SchemeName>>,
    pub profile: ProfileConfig,
    pub errors: ErrorConfig,
    pub scan: ScanConfig,
    pub device: DeviceConfig,
    pub noise: NoiseConfig,
    pub numerics: NumericsConfig,
    pub sweep: SweepConfig,
    /// Latitude of the second logical qubit's path for the geometric CP gate (rad).
    pub cp_chi: Option<f64>,
}

/// Validated scenario with all units converted to rad/µs and µs.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub kind: Kind,
    pub targets: Vec<Target>,
    pub schemes: Vec<SchemeName>,
    pub shapes: Vec<ShapeName>,
    pub peak: f64,
    pub epsilon: f64,
    pub eta: f64,
    pub eps_grid: Vec<f64>,
    pub eta_grid: Vec<f64>,
    pub trace: TraceMode,
    pub run: DeviceRun,
    pub cp_chi: f64,
    pub kappa_sweep: Option<Vec<f64>>,
    pub drift1_sweep: Option<Vec<f64>>,
    pub drift2_sweep: Option<Vec<f64>>,
}

impl Scenario {
    pub fn profile(&self, shape: ShapeName) -> Profile {
        Profile {
            shape: shape.core(),
            peak: self.peak,
        }
    }
}

pub fn read_config(path: &Path) -> Result<(Config, Vec<u8>), CliError> {
    let bytes = std::fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let cfg = parse_bytes(&bytes)?;
    Ok((cfg, bytes))
}

pub fn parse_bytes(bytes: &[u8]) -> Result<Config, CliError> {
    serde_json::from_slice(bytes).map_err(|e| CliError::config(e.to_string()))
}

fn finite(key: &str, v: f64) -> Result<f64, CliError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(CliError::config(format!("{key}: must be finite")))
    }
}

fn rate(key: &str, v: Option<f64>, default: f64) -> Result<f64, CliError> {
    match v {
        None => Ok(default),
        Some(x) if x.is_finite() && x >= 0.0 => Ok(mhz(x)),
        Some(_) => Err(CliError::config(format!("{key}: must be finite and non-negative"))),
    }
}

fn positive_mhz(key: &str, v: Option<f64>, default: f64) -> Result<f64, CliError> {
    match v {
        None => Ok(default),
        Some(x) if x.is_finite() && x > 0.0 => Ok(mhz(x)),
        Some(_) => Err(CliError::config(format!("{key}: must be finite and positive"))),
    }
}

fn parse_target(s: &str) -> Result<Target, CliError> {
    if s.eq_ignore_ascii_case("cp") {
        return Ok(Target::Cp);
    }
    s.parse::<GateName>()
        .map(Target::Single)
        .map_err(|_| CliError::config(format!("gate: unknown gate '{s}' (expected H, S, T or CP)")))
}

impl Config {
    /// Checks the file against the subcommand and converts units.
    pub fn scenario(&self, kind: Kind) -> Result<Scenario, CliError> {
        if let Some(k) = self.kind {
            if k != kind {
                return Err(CliError::config(format!(
                    "kind: file is for '{}' but the command is '{}'",
                    k.name(),
                    kind.name()
                )));
            }
        }
        let names: Vec<String> = match (&self.gate, &self.gates) {
            (Some(_), Some(_)) => return Err(CliError::config("gate/gates: give one or the other")),
            (Some(g), None) => vec![g.clone()],
            (None, Some(gs)) => gs.clone(),
            (None, None) if kind == Kind::Report => vec!["H".into(), "S".into(), "T".into(), "CP".into()],
            (None, None) => vec!["H".into(), "S".into(), "T".into()],
        };
        if names.is_empty() {
            return Err(CliError::config("gates: list is empty"));
        }
        let targets = names.iter().map(|s| parse_target(s)).collect::<Result<Vec<_>, _>>()?;
        if targets.contains(&Target::Cp) && !matches!(kind, Kind::Master | Kind::Report) {
            return Err(CliError::config(format!(
                "gate: CP is only available to master and report, not {}",
                kind.name()
            )));
        }
        let schemes = match (self.scheme, &self.schemes) {
            (Some(_), Some(_)) => return Err(CliError::config("scheme/schemes: give one or the other")),
            (Some(s), None) => vec![s],
            (None, Some(v)) if v.is_empty() => return Err(CliError::config("schemes: list is empty")),
            (None, Some(v)) => v.clone(),
            (None, None) => vec![SchemeName::Geometric, SchemeName::Dynamical],
        };
        let shapes = match self.profile.shape {
            Some(s) => vec![s],
            None if kind == Kind::Synth => vec![ShapeName::Square, ShapeName::Sine],
            None => vec![ShapeName::Square],
        };
        let peak = positive_mhz("profile.peak_mhz", self.profile.peak_mhz, 1.0)?;
        let epsilon = finite("errors.epsilon", self.errors.epsilon)?;
        if epsilon <= -1.0 {
            return Err(CliError::config("errors.epsilon: must exceed -1"));
        }
        let eta = finite("errors.eta", self.errors.eta)?;
        let default_axis = Range {
            min: -0.1,
            max: 0.1,
            n: 41,
        };
        let eps_grid = self.scan.epsilon.unwrap_or(default_axis).values("scan.epsilon")?;
        if eps_grid.iter().any(|&e| e <= -1.0) {
            return Err(CliError::config("scan.epsilon: values must exceed -1"));
        }
        let eta_grid = self.scan.eta.unwrap_or(default_axis).values("scan.eta")?;
        let trace = match self.scan.trace.unwrap_or(TraceName::Magnitude) {
            TraceName::Magnitude => TraceMode::Magnitude,
            TraceName::RealPart => TraceMode::RealPart,
        };
        let run = self.device_run()?;
        let cp_chi = finite("cp_chi", self.cp_chi.unwrap_or(os::CP_CHI))?;
        let kappa_sweep = self.sweep.kappa_mhz.map(|r| r.values("sweep.kappa_mhz")).transpose()?;
        if kappa_sweep.as_ref().is_some_and(|v| v.iter().any(|&k| k < 0.0)) {
            return Err(CliError::config("sweep.kappa_mhz: rates must be non-negative"));
        }
        let drift1_sweep = self.sweep.drift1_mhz.map(|r| r.values("sweep.drift1_mhz")).transpose()?;
        let drift2_sweep = self.sweep.drift2_mhz.map(|r| r.values("sweep.drift2_mhz")).transpose()?;
        if drift2_sweep.is_some() {
            if drift1_sweep.is_none() {
                return Err(CliError::config("sweep.drift2_mhz: requires sweep.drift1_mhz"));
            }
            if targets.iter().any(|t| *t != Target::Cp) {
                return Err(CliError::config("sweep.drift2_mhz: drift grids apply to CP only"));
            }
        }
        let mhz_all = |v: Option<Vec<f64>>| v.map(|v| v.into_iter().map(mhz).collect::<Vec<_>>());
        Ok(Scenario {
            kind,
            targets,
            schemes,
            shapes,
            peak,
            epsilon,
            eta,
            eps_grid,
            eta_grid,
            trace,
            run,
            cp_chi,
            kappa_sweep: mhz_all(kappa_sweep),
            drift1_sweep: mhz_all(drift1_sweep),
            drift2_sweep: mhz_all(drift2_sweep),
        })
    }

    fn device_run(&self) -> Result<DeviceRun, CliError> {
        let d = &self.device;
        let base = DeviceParams::default();
        let params = DeviceParams {
            g_1a: positive_mhz("device.g_1a_mhz", d.g_1a_mhz, base.g_1a)?,
            g_a2: positive_mhz("device.g_a2_mhz", d.g_a2_mhz, base.g_a2)?,
            delta1: positive_mhz("device.delta1_mhz", d.delta1_mhz, base.delta1)?,
            delta2: positive_mhz("device.delta2_mhz", d.delta2_mhz, base.delta2)?,
            alpha1: positive_mhz("device.alpha1_mhz", d.alpha1_mhz, base.alpha1)?,
            alpha2: positive_mhz("device.alpha2_mhz", d.alpha2_mhz, base.alpha2)?,
            levels_transmon: d.levels_transmon.unwrap_or(base.levels_transmon),
            levels_resonator: d.levels_resonator.unwrap_or(base.levels_resonator),
        };
        params.validate().map_err(|e| CliError::config(format!("device: {e}")))?;
        let n0 = NoiseParams::default();
        let noise = NoiseParams {
            kappa_minus: rate("noise.kappa_minus_mhz", self.noise.kappa_minus_mhz, n0.kappa_minus)?,
            kappa_z: rate("noise.kappa_z_mhz", self.noise.kappa_z_mhz, n0.kappa_z)?,
            kappa_a: rate("noise.kappa_a_mhz", self.noise.kappa_a_mhz, n0.kappa_a)?,
            kappa_b: rate("noise.kappa_b_mhz", self.noise.kappa_b_mhz, n0.kappa_b)?,
        };
        let r0 = DeviceRun::default();
        let beta = |key: &str, v: Option<f64>, dflt: f64| match v {
            None => Ok(dflt),
            Some(b) if b.is_finite() && b > 0.0 => Ok(b),
            Some(_) => Err(CliError::config(format!("{key}: must be finite and positive"))),
        };
        let n = FidelityNumerics::default();
        let numerics = FidelityNumerics {
            max_step: match self.numerics.max_step_us {
                None => n.max_step,
                Some(h) if h.is_finite() && h > 0.0 => h,
                Some(_) => return Err(CliError::config("numerics.max_step_us: must be positive")),
            },
            points_single: self.numerics.points_single.unwrap_or(n.points_single),
            points_two: self.numerics.points_two.unwrap_or(n.points_two),
        };
        if numerics.points_single < 2 || numerics.points_two < 2 {
            return Err(CliError::config("numerics.points_*: need at least 2 nodes"));
        }
        Ok(DeviceRun {
            params,
            noise,
            beta1: beta("device.beta1", d.beta1, r0.beta1)?,
            beta2: beta("device.beta2", d.beta2, r0.beta2)?,
            drift1: mhz(finite("device.drift1_mhz", d.drift1_mhz.unwrap_or(0.0))?),
            drift2: mhz(finite("device.drift2_mhz", d.drift2_mhz.unwrap_or(0.0))?),
            numerics,
        })
    }
}

/// Inverse of [`mhz`], for reporting.
pub fn to_mhz(w: f64) -> f64 {
    w / (2.0 * PI)
}
