use serde::{Deserialize, Serialize};

use crate::error::{domain, Result};

/// Dimensional constants of the problem together with the derived
/// cyclotron frequency, `beta = m * omega_c` and the magnetic length.
///
/// Construct through [`PhysicalParams::new`]; the derived fields are
/// always consistent with the stored inputs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhysicalParams {
    hbar: f64,
    mass: f64,
    charge: f64,
    light_speed: f64,
    field: f64,
    omega_c: f64,
    beta: f64,
    mag_length: f64,
}

impl PhysicalParams {
    pub fn new(hbar: f64, mass: f64, charge: f64, light_speed: f64, field: f64) -> Result<Self> {
        for (name, v) in [
            ("hbar", hbar),
            ("mass", mass),
            ("charge", charge),
            ("light_speed", light_speed),
            ("field", field),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return domain(format!("{name} must be finite and > 0, got {v}"));
            }
        }
        let omega_c = charge * field / (mass * light_speed);
        let beta = mass * omega_c;
        let mag_length = (hbar / beta).sqrt();
        if !(omega_c > 0.0 && beta > 0.0 && mag_length > 0.0)
            || !(omega_c.is_finite() && beta.is_finite() && mag_length.is_finite())
        {
            return domain("derived constants are not finite and positive");
        }
        Ok(Self {
            hbar,
            mass,
            charge,
            light_speed,
            field,
            omega_c,
            beta,
            mag_length,
        })
    }

    /// hbar = m = e = c = B = 1.
    pub fn natural() -> Self {
        Self::new(1.0, 1.0, 1.0, 1.0, 1.0).expect("natural units are valid")
    }

    /// Same constants with a different field strength.
    pub fn with_field(&self, field: f64) -> Result<Self> {
        Self::new(self.hbar, self.mass, self.charge, self.light_speed, field)
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }
    pub fn mass(&self) -> f64 {
        self.mass
    }
    pub fn charge(&self) -> f64 {
        self.charge
    }
    pub fn light_speed(&self) -> f64 {
        self.light_speed
    }
    pub fn field(&self) -> f64 {
        self.field
    }
    pub fn omega_c(&self) -> f64 {
        self.omega_c
    }
    pub fn beta(&self) -> f64 {
        self.beta
    }
    pub fn mag_length(&self) -> f64 {
        self.mag_length
    }

    /// sqrt(beta / hbar): maps a length onto the dimensionless oscillator
    /// variable.
    pub fn inverse_length(&self) -> f64 {
        1.0 / self.mag_length
    }

    /// hbar * omega_c * (n + 1/2).
    pub fn landau_level(&self, n: usize) -> f64 {
        self.hbar * self.omega_c * (n as f64 + 0.5)
    }

    /// 2 pi / omega_c.
    pub fn cyclotron_period(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.omega_c
    }
}

impl Default for PhysicalParams {
    fn default() -> Self {
        Self::natural()
    }
}

/// Raw inputs of [`PhysicalParams`], as they appear in config files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ParamInputs {
    pub hbar: f64,
    pub mass: f64,
    pub charge: f64,
    pub light_speed: f64,
    pub field: f64,
}

impl Default for ParamInputs {
    fn default() -> Self {
        Self {
            hbar: 1.0,
            mass: 1.0,
            charge: 1.0,
            light_speed: 1.0,
            field: 1.0,
        }
    }
}

impl ParamInputs {
    pub fn derive(&self) -> Result<PhysicalParams> {
        PhysicalParams::new(self.hbar, self.mass, self.charge, self.light_speed, self.field)
    }
}

impl From<&PhysicalParams> for ParamInputs {
    fn from(p: &PhysicalParams) -> Self {
        Self {
            hbar: p.hbar,
            mass: p.mass,
            charge: p.charge,
            light_speed: p.light_speed,
            field: p.field,
        }
    }
}

/// Vector-potential choice. Both describe the same field `B z`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GaugeChoice {
    /// A = (-B y, 0, 0)
    #[default]
    LandauX,
    /// A = (0, B x, 0)
    LandauY,
}

impl GaugeChoice {
    /// Maps a point to the coordinates in which the `LandauX` formulas
    /// apply. `LandauY` is the `LandauX` problem rotated by a quarter turn:
    /// (x, y) -> (y, -x). A rotation, unlike the x<->y reflection, keeps
    /// the orientation of B.
    pub fn to_landau_x_frame(self, x: f64, y: f64) -> (f64, f64) {
        match self {
            GaugeChoice::LandauX => (x, y),
            GaugeChoice::LandauY => (y, -x),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            GaugeChoice::LandauX => "landau-x",
            GaugeChoice::LandauY => "landau-y",
        }
    }
}

impl std::str::FromStr for GaugeChoice {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "landau-x" => Ok(GaugeChoice::LandauX),
            "landau-y" => Ok(GaugeChoice::LandauY),
            other => Err(format!("unknown gauge '{other}' (expected landau-x or landau-y)")),
        }
    }
}

/// Labels of the eigenfunctions: oscillator level `n`, the eigenvalue `k`
/// of `Pbar` and `kprime = beta * (eigenvalue of Qbar)` carried by the
/// delta-line term.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantumNumbers {
    pub n: usize,
    pub k: f64,
    pub kprime: f64,
}

impl QuantumNumbers {
    pub fn new(n: usize, k: f64, kprime: f64) -> Result<Self> {
        if !k.is_finite() || !kprime.is_finite() {
            return domain(format!("quantum numbers must be finite (k = {k}, kprime = {kprime})"));
        }
        Ok(Self { n, k, kprime })
    }
}
