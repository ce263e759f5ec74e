//! Run settings: one struct holding every default, loaded from an optional
//! JSON file and then overridden by command-line flags.
//!
//! A config file is either a bare settings object (any subset of keys) or
//! a `manifest.json` written by an earlier run, whose `config` member is
//! used. Re-running a command with `--config manifest.json` reproduces its
//! data files.

use std::path::Path;

use anyhow::Context;
use landau_core::mqtransform::RegulatorSchedule;
use landau_core::{Complex64, GaugeChoice, Grid2D, ParamInputs, PhysicalParams, StencilOrder};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub physics: PhysicsSettings,
    pub gauge: GaugeChoice,
    pub grid: GridSettings,
    pub order: StencilOrder,
    pub seed: u64,
    pub eval: EvalSettings,
    pub spectrum: SpectrumSettings,
    pub transform: TransformSettings,
    pub orbit: OrbitSettings,
    pub verify: VerifySettings,
    pub params: ParamsSettings,
}

impl Default for Settings {
    fn default() -> Self {
        Self {
            physics: PhysicsSettings::default(),
            gauge: GaugeChoice::LandauX,
            grid: GridSettings::default(),
            order: StencilOrder::Fourth,
            seed: 0,
            eval: EvalSettings::default(),
            spectrum: SpectrumSettings::default(),
            transform: TransformSettings::default(),
            orbit: OrbitSettings::default(),
            verify: VerifySettings::default(),
            params: ParamsSettings::default(),
        }
    }
}

impl Settings {
    pub fn params(&self) -> Result<PhysicalParams, CliError> {
        let p = &self.physics;
        ParamInputs {
            hbar: p.hbar,
            mass: p.mass,
            charge: p.charge,
            light_speed: p.cspeed,
            field: p.field,
        }
        .derive()
        .map_err(|e| CliError::Usage(e.to_string()))
    }

    pub fn grid(&self) -> Result<Grid2D, CliError> {
        let g = &self.grid;
        Grid2D::new((g.x_min, g.x_max), (g.y_min, g.y_max), g.nx, g.ny)
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

/// Natural units by default: `hbar = m = e = c = B = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PhysicsSettings {
    pub hbar: f64,
    pub mass: f64,
    pub charge: f64,
    pub cspeed: f64,
    pub field: f64,
}

impl Default for PhysicsSettings {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            charge: 1.0,
            cspeed: 1.0,
            field: 1.0,
        }
    }
}

/// `[-10, 10]^2` with 257 points per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridSettings {
    pub x_min: f64,
    pub x_max: f64,
    pub nx: usize,
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
}

impl Default for GridSettings {
    fn default() -> Self {
        Self {
            x_min: -10.0,
            x_max: 10.0,
            nx: 257,
            y_min: -10.0,
            y_max: 10.0,
            ny: 257,
        }
    }
}

/// `min:max:npts`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisSpec {
    pub min: f64,
    pub max: f64,
    pub n: usize,
}

impl std::str::FromStr for AxisSpec {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("expected min:max:npts, got {s:?}"));
        }
        let min: f64 = parts[0].trim().parse().map_err(|_| format!("bad minimum {:?}", parts[0]))?;
        let max: f64 = parts[1].trim().parse().map_err(|_| format!("bad maximum {:?}", parts[1]))?;
        let n: usize = parts[2].trim().parse().map_err(|_| format!("bad point count {:?}", parts[2]))?;
        Ok(AxisSpec { min, max, n })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvalSettings {
    /// Required; there is no default level.
    pub n: Option<usize>,
    pub k: f64,
    pub kprime: f64,
    pub nonfree: bool,
    /// `[re, im]` weight of the plane-wave term of the non-free state.
    pub c_plane: [f64; 2],
    /// `[re, im]` weight of the delta-line term of the non-free state.
    pub c_delta: [f64; 2],
    pub heatmap: bool,
}

impl Default for EvalSettings {
    fn default() -> Self {
        Self {
            n: None,
            k: 0.0,
            kprime: 0.0,
            nonfree: false,
            c_plane: [1.0, 0.0],
            c_delta: [1.0, 0.0],
            heatmap: false,
        }
    }
}

pub fn complex(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSettings {
    pub n_eigs: usize,
    pub guard: Option<usize>,
    pub degree: usize,
    /// Residual tolerance in units of `hbar omega_c`.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SpectrumSettings {
    fn default() -> Self {
        let s = landau_core::operators::SolverConfig::default();
        Self {
            n_eigs: s.n_eigs,
            guard: s.guard,
            degree: s.degree,
            tol: s.tol,
            max_iter: s.max_iter,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    #[default]
    PlaneWave,
    Delta,
    /// `exp(-(Q^2 + Qbar^2) / 2 l^2)`, checked against an unregulated
    /// brute-force quadrature.
    CustomGaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TransformSettings {
    pub branch: Branch,
    pub n: usize,
    pub k: f64,
    pub kprime: f64,
    pub schedule: RegulatorSchedule,
    /// Largest accepted `|numeric - reference|` over the probe grid.
    pub tolerance: f64,
}

impl Default for TransformSettings {
    fn default() -> Self {
        Self {
            branch: Branch::PlaneWave,
            n: 0,
            k: 0.0,
            kprime: 0.0,
            schedule: RegulatorSchedule::default(),
            tolerance: 1e-3,
        }
    }
}

/// Starts on the unit circle about the origin; `dt` defaults to a
/// thousandth of the cyclotron period.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OrbitSettings {
    pub x0: f64,
    pub y0: f64,
    pub vx0: f64,
    pub vy0: f64,
    pub dt: Option<f64>,
    pub steps: usize,
}

impl Default for OrbitSettings {
    fn default() -> Self {
        Self {
            x0: 1.0,
            y0: 0.0,
            vx0: 0.0,
            vy0: 1.0,
            dt: None,
            steps: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySettings {
    /// Grid spacing of the operator checks.
    pub h: f64,
    /// Order whose convergence ratio `2^p` is expected; defaults to the
    /// stencil order.
    pub expect_order: Option<u32>,
    pub break_gauge: bool,
}

impl Default for VerifySettings {
    fn default() -> Self {
        Self {
            h: 0.02,
            expect_order: None,
            break_gauge: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ParamsSettings {
    /// Number of Landau levels listed.
    pub levels: usize,
}

impl Default for ParamsSettings {
    fn default() -> Self {
        Self { levels: 4 }
    }
}

/// Reads a settings file or a previous run's manifest. When the file names
/// a command, it must match `command`.
pub fn load_config(path: &Path, command: &str) -> Result<Settings, CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config {}", path.display()))
        .map_err(|e| CliError::Usage(format!("{e:#}")))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("config {} is not JSON: {e}", path.display())))?;
    let body = match value.get("config") {
        Some(cfg) => {
            if let Some(recorded) = value.get("command").and_then(|c| c.as_str()) {
                if recorded != command {
                    return Err(CliError::Usage(format!(
                        "manifest {} records command {recorded:?}, not {command:?}",
                        path.display()
                    )));
                }
            }
            cfg.clone()
        }
        None => value,
    };
    serde_json::from_value(body)
        .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn axis_spec_parses() {
        let a: AxisSpec = "-10:10:257".parse().unwrap();
        assert_eq!(a, AxisSpec { min: -10.0, max: 10.0, n: 257 });
        assert!("1:2".parse::<AxisSpec>().is_err());
        assert!("a:2:3".parse::<AxisSpec>().is_err());
        assert!("0:1:-3".parse::<AxisSpec>().is_err());
    }

    #[test]
    fn settings_round_trip_and_partial_files() {
        let s = Settings::default();
        let text = serde_json::to_string(&s).unwrap();
        let back: Settings = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
        let partial: Settings = serde_json::from_str(r#"{"physics": {"field": 2.0}, "eval": {"n": 3}}"#).unwrap();
        assert_eq!(partial.physics.field, 2.0);
        assert_eq!(partial.physics.mass, 1.0);
        assert_eq!(partial.eval.n, Some(3));
        assert!(serde_json::from_str::<Settings>(r#"{"bogus": 1}"#).is_err());
    }

    #[test]
    fn manifest_command_must_match() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("manifest.json");
        std::fs::write(&path, r#"{"command": "orbit", "config": {"seed": 5}}"#).unwrap();
        assert_eq!(load_config(&path, "orbit").unwrap().seed, 5);
        assert!(matches!(load_config(&path, "eval"), Err(CliError::Usage(_))));
    }
}
