use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::ScenarioError;

/// Bending actuator family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ActuatorKind {
    /// Series pouch motor, welded over two layers and taped onto the beam.
    Spam,
    /// Compression PAM: gusseted pouch welded over four layers onto the beam.
    Cpam,
    /// Embedded PAM: outer layer welded directly onto the beam wall.
    Epam,
    /// Fabric PAM: bias-cut silicone-nylon tube glued onto the beam.
    Fpam,
}

impl ActuatorKind {
    pub const ALL: [ActuatorKind; 4] = [
        ActuatorKind::Spam,
        ActuatorKind::Cpam,
        ActuatorKind::Epam,
        ActuatorKind::Fpam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ActuatorKind::Spam => "spam",
            ActuatorKind::Cpam => "cpam",
            ActuatorKind::Epam => "epam",
            ActuatorKind::Fpam => "fpam",
        }
    }
}

impl fmt::Display for ActuatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ActuatorKind {
    type Err = ScenarioError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "spam" | "spam_pm" | "pm" => Ok(ActuatorKind::Spam),
            "cpam" => Ok(ActuatorKind::Cpam),
            "epam" => Ok(ActuatorKind::Epam),
            "fpam" => Ok(ActuatorKind::Fpam),
            other => Err(ScenarioError::UnknownKind(other.to_string())),
        }
    }
}

/// Geometry, loading and discretisation of one benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ScenarioSpec {
    /// Beam length (mm).
    pub l_ibr: f64,
    /// Beam diameter (mm).
    pub d_ibr: f64,
    /// Length of one actuator pouch (mm).
    pub l_actuator: f64,
    /// Actuator width (mm), measured along the beam circumference.
    pub w: f64,
    /// cPAM gusset fold depth (mm).
    pub f: f64,
    pub actuator_count: usize,
    /// Axial start of the first pouch (mm); `None` centres the pouch row.
    pub actuator_start: Option<f64>,
    /// kPa
    pub beam_pressure: f64,
    /// kPa
    pub actuator_pressure: f64,
    pub mesh_size_beam: f64,
    pub mesh_size_actuator: f64,
    /// Separation between stacked layers (mm).
    pub layer_gap: f64,
    /// Width of the fPAM glue strip (mm).
    pub glue_width: f64,
    pub glue_stiffness_scale: f64,
    /// Adhesive thickness added in the glue zone (µm).
    pub glue_thickness_add: f64,
}

impl Default for ScenarioSpec {
    fn default() -> Self {
        Self {
            l_ibr: 360.0,
            d_ibr: 80.0,
            l_actuator: 60.0,
            w: 60.0,
            f: 24.0,
            actuator_count: 5,
            actuator_start: None,
            beam_pressure: 2.0,
            actuator_pressure: 30.0,
            mesh_size_beam: 8.0,
            mesh_size_actuator: 2.0,
            layer_gap: 0.01,
            glue_width: 20.0,
            glue_stiffness_scale: 3.0,
            glue_thickness_add: 100.0,
        }
    }
}

impl ScenarioSpec {
    /// Table defaults for `kind`.
    pub fn for_kind(kind: ActuatorKind) -> Self {
        let mut s = Self::default();
        if kind == ActuatorKind::Fpam {
            s.l_actuator = 300.0;
            s.actuator_count = 1;
        }
        s
    }

    pub fn radius(&self) -> f64 {
        0.5 * self.d_ibr
    }

    pub fn footprint_start(&self) -> f64 {
        self.actuator_start
            .unwrap_or(0.5 * (self.l_ibr - self.footprint_length()))
    }

    pub fn footprint_length(&self) -> f64 {
        self.l_actuator * self.actuator_count as f64
    }

    /// Axial centres of the pouches (mm).
    pub fn pouch_centers(&self) -> Vec<f64> {
        let x0 = self.footprint_start();
        (0..self.actuator_count)
            .map(|k| x0 + (k as f64 + 0.5) * self.l_actuator)
            .collect()
    }

    pub fn validate(&self, kind: ActuatorKind) -> Result<(), ScenarioError> {
        let positive = [
            ("l_ibr", self.l_ibr),
            ("d_ibr", self.d_ibr),
            ("l_actuator", self.l_actuator),
            ("w", self.w),
            ("mesh_size_beam", self.mesh_size_beam),
            ("mesh_size_actuator", self.mesh_size_actuator),
            ("layer_gap", self.layer_gap),
        ];
        for (name, v) in positive {
            if !(v > 0.0) || !v.is_finite() {
                return Err(ScenarioError::InvalidOverride(format!("{name} must be positive, got {v}")));
            }
        }
        if self.actuator_count == 0 {
            return Err(ScenarioError::InvalidOverride("actuator_count must be at least 1".into()));
        }
        if !(self.beam_pressure >= 0.0) || !(self.actuator_pressure >= 0.0) {
            return Err(ScenarioError::InvalidOverride("pressures must be non-negative".into()));
        }
        let x0 = self.footprint_start();
        if x0 < 0.0 || x0 + self.footprint_length() > self.l_ibr + 1e-9 {
            return Err(ScenarioError::InvalidOverride(format!(
                "actuators [{x0}, {}] do not fit on a {} mm beam",
                x0 + self.footprint_length(),
                self.l_ibr
            )));
        }
        if self.w >= std::f64::consts::PI * self.d_ibr {
            return Err(ScenarioError::InvalidOverride("actuator wider than the beam circumference".into()));
        }
        if self.mesh_size_actuator > self.w / 10.0 {
            return Err(ScenarioError::InvalidOverride(format!(
                "actuator mesh size {} exceeds W/10 = {}",
                self.mesh_size_actuator,
                self.w / 10.0
            )));
        }
        if self.mesh_size_beam >= self.d_ibr {
            return Err(ScenarioError::InvalidOverride("beam mesh size must be below the diameter".into()));
        }
        if kind == ActuatorKind::Cpam && !(self.f > 0.0 && self.f < 0.5 * self.w) {
            return Err(ScenarioError::InvalidOverride(format!(
                "fold depth f = {} must lie in (0, W/2)",
                self.f
            )));
        }
        if kind == ActuatorKind::Fpam {
            if !(self.glue_width > 0.0 && self.glue_width <= self.w) {
                return Err(ScenarioError::InvalidOverride("glue width must lie in (0, W]".into()));
            }
            if !(self.glue_stiffness_scale >= 1.0) || !(self.glue_thickness_add >= 0.0) {
                return Err(ScenarioError::InvalidOverride("invalid glue composite parameters".into()));
            }
        }
        Ok(())
    }
}
