//! Benchmark builders and parameter studies.
//!
//! Every benchmark inflates the beam over the first 0.1 s, holds it, and
//! ramps the actuator chambers over the following second. Each pressure
//! level is an independent job starting from the unloaded state.

mod spec;

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use spec::{ActuatorKind, ScenarioSpec};

use crate::materials::library::{silicone_nylon, tpu_nylon};
use crate::materials::{Material, MaterialError};
use crate::mesh::{
    build_assembly_with_gap, generate_actuator, generate_beam, Assembly, CylinderLayout, MeshError,
};
use crate::solver::{AmplitudeSegment, LoadSchedule, PressureChannel, SolverConfig};

/// Beam inflation window (s).
pub const BEAM_RAMP: AmplitudeSegment = AmplitudeSegment { t_start: 0.0, t_end: 0.1 };
/// Actuator inflation window (s).
pub const ACTUATOR_RAMP: AmplitudeSegment = AmplitudeSegment { t_start: 0.1, t_end: 1.1 };
pub const PINNED_SET: &str = "beam.end_pinned";

#[derive(Debug, Error)]
pub enum ScenarioError {
    #[error("unknown actuator kind `{0}` (expected spam, cpam, epam or fpam)")]
    UnknownKind(String),
    #[error("invalid override: {0}")]
    InvalidOverride(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Material(#[from] MaterialError),
    #[error("scenario file {path}: {message}")]
    File { path: String, message: String },
}

/// A ready-to-run simulation.
#[derive(Debug, Clone)]
pub struct ScenarioJob {
    /// `beam` or the actuator name.
    pub name: String,
    pub kind: Option<ActuatorKind>,
    pub spec: ScenarioSpec,
    pub assembly: Assembly,
    pub layout: CylinderLayout,
    /// Sheet materials indexed by mesh material slot.
    pub materials: Vec<Material>,
    pub schedule: LoadSchedule,
    pub pinned_set: String,
    pub config: SolverConfig,
}

impl ScenarioJob {
    /// Peak actuator pressure (kPa), 0 for the beam-only job.
    pub fn pressure(&self) -> f64 {
        if self.kind.is_some() {
            self.spec.actuator_pressure
        } else {
            0.0
        }
    }

    /// Marker node ids in the merged mesh, root to tip.
    pub fn markers(&self) -> &[usize] {
        self.assembly
            .mesh
            .node_sets
            .get("beam.centerline_markers")
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Output file stem `<scenario>_<pressure>kPa`.
    pub fn stem(&self) -> String {
        format!("{}_{}kPa", self.name, format_pressure(self.pressure()))
    }
}

/// Shortest decimal form of a pressure for file names.
pub fn format_pressure(p: f64) -> String {
    let s = format!("{p}");
    s.replace('.', "p")
}

/// Material slots: TPU-nylon, silicone-nylon and the glued silicone-nylon
/// composite.
pub fn default_materials(spec: &ScenarioSpec) -> Result<Vec<Material>, ScenarioError> {
    let silicone = silicone_nylon();
    let glue = silicone.with_composite(spec.glue_stiffness_scale, spec.glue_thickness_add)?;
    Ok(vec![tpu_nylon(), silicone, glue])
}

fn beam_channel(spec: &ScenarioSpec) -> PressureChannel {
    PressureChannel {
        surface_set: "beam_interior".into(),
        peak_pressure: spec.beam_pressure,
        amplitude: BEAM_RAMP,
    }
}

/// Benchmark job for `kind` at peak actuator pressure `pressure` (kPa).
pub fn build_benchmark(
    kind: ActuatorKind,
    pressure: f64,
    overrides: &ScenarioSpec,
    config: &SolverConfig,
) -> Result<ScenarioJob, ScenarioError> {
    if !(pressure > 0.0) || !pressure.is_finite() {
        return Err(ScenarioError::InvalidOverride(format!("pressure must be positive, got {pressure}")));
    }
    let mut spec = overrides.clone();
    spec.actuator_pressure = pressure;
    spec.validate(kind)?;
    let (beam, layout) = generate_beam(&spec)?;
    let act = generate_actuator(kind, &spec, spec.mesh_size_actuator)?;
    let assembly = build_assembly_with_gap(beam, vec![act], kind, spec.layer_gap)?;
    let schedule = LoadSchedule {
        channels: vec![
            beam_channel(&spec),
            PressureChannel {
                surface_set: "actuator_interior".into(),
                peak_pressure: pressure,
                amplitude: ACTUATOR_RAMP,
            },
        ],
    };
    Ok(ScenarioJob {
        name: kind.name().into(),
        kind: Some(kind),
        materials: default_materials(&spec)?,
        spec,
        assembly,
        layout,
        schedule,
        pinned_set: PINNED_SET.into(),
        config: config.clone(),
    })
}

/// Inflation of the bare beam (no actuator).
pub fn build_beam_only(overrides: &ScenarioSpec, config: &SolverConfig) -> Result<ScenarioJob, ScenarioError> {
    let spec = overrides.clone();
    spec.validate(ActuatorKind::Spam)?;
    let (beam, layout) = generate_beam(&spec)?;
    let assembly = build_assembly_with_gap(beam, vec![], ActuatorKind::Spam, spec.layer_gap)?;
    Ok(ScenarioJob {
        name: "beam".into(),
        kind: None,
        materials: default_materials(&spec)?,
        spec: spec.clone(),
        assembly,
        layout,
        schedule: LoadSchedule {
            channels: vec![beam_channel(&spec)],
        },
        pinned_set: PINNED_SET.into(),
        config: config.clone(),
    })
}

/// One independent job per pressure.
pub fn pressure_sweep(
    kind: ActuatorKind,
    pressures: &[f64],
    overrides: &ScenarioSpec,
    config: &SolverConfig,
) -> Result<Vec<ScenarioJob>, ScenarioError> {
    pressures
        .iter()
        .map(|&p| build_benchmark(kind, p, overrides, config))
        .collect()
}

/// Jobs differing only in actuator mesh size; the beam mesh is scaled in
/// proportion.
pub fn mesh_sweep(
    kind: ActuatorKind,
    sizes: &[f64],
    overrides: &ScenarioSpec,
    config: &SolverConfig,
) -> Result<Vec<ScenarioJob>, ScenarioError> {
    sizes
        .iter()
        .map(|&h| {
            if !(h > 0.0) {
                return Err(ScenarioError::InvalidOverride(format!("mesh size must be positive, got {h}")));
            }
            let mut spec = overrides.clone();
            spec.mesh_size_beam = overrides.mesh_size_beam * h / overrides.mesh_size_actuator;
            spec.mesh_size_actuator = h;
            build_benchmark(kind, overrides.actuator_pressure, &spec, config)
        })
        .collect()
}

/// Key-value scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioFile {
    pub actuator: Option<ActuatorKind>,
    #[serde(default)]
    pub spec: ScenarioSpec,
    #[serde(default)]
    pub solver: SolverConfig,
}

impl ScenarioFile {
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let err = |message: String| ScenarioError::File {
            path: path.display().to_string(),
            message,
        };
        let text = std::fs::read_to_string(path).map_err(|e| err(e.to_string()))?;
        Self::parse(&text).map_err(|e| match e {
            ScenarioError::File { message, .. } => err(message),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::File {
            path: "<string>".into(),
            message: e.to_string(),
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("scenario serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{MAT_GLUE, MAT_SILICONE};

    fn cfg() -> SolverConfig {
        SolverConfig::default()
    }

    #[test]
    fn cpam_job_has_folds_and_four_layer_ties() {
        let job = build_benchmark(ActuatorKind::Cpam, 30.0, &ScenarioSpec::default(), &cfg()).unwrap();
        assert_eq!(job.schedule.channels.len(), 2);
        assert!(job.assembly.mesh.node_sets.contains_key("actuator.weld_four_layer"));
        assert!(job.assembly.ties.len() >= 3);
        assert_eq!(job.spec.f, 24.0);
    }

    #[test]
    fn fpam_job_uses_fabric_and_glue() {
        let spec = ScenarioSpec::for_kind(ActuatorKind::Fpam);
        let job = build_benchmark(ActuatorKind::Fpam, 10.0, &spec, &cfg()).unwrap();
        assert_eq!(job.spec.l_actuator, 300.0);
        let mesh = &job.assembly.mesh;
        assert!(mesh.elements.iter().any(|e| e.material_id == MAT_GLUE));
        assert!(mesh
            .elements
            .iter()
            .filter(|e| e.material_id == MAT_SILICONE)
            .all(|e| e.fiber_angle == 45.0));
    }

    #[test]
    fn schedule_follows_ramps() {
        let job = build_benchmark(ActuatorKind::Spam, 0.0001, &ScenarioSpec::default(), &cfg()).unwrap();
        let [beam, act] = [&job.schedule.channels[0], &job.schedule.channels[1]];
        assert_eq!(beam.amplitude.at(0.0), 0.0);
        assert_eq!(beam.amplitude.at(0.1), 1.0);
        assert_eq!(act.amplitude.at(0.1), 0.0);
        assert_eq!(act.amplitude.at(1.1), 1.0);
    }

    #[test]
    fn invalid_inputs_rejected() {
        let spec = ScenarioSpec::default();
        assert!(build_benchmark(ActuatorKind::Cpam, -5.0, &spec, &cfg()).is_err());
        let bad = ScenarioSpec { l_ibr: -1.0, ..spec.clone() };
        assert!(matches!(
            build_benchmark(ActuatorKind::Epam, 10.0, &bad, &cfg()),
            Err(ScenarioError::InvalidOverride(_))
        ));
        assert!(mesh_sweep(ActuatorKind::Cpam, &[0.0], &spec, &cfg()).is_err());
    }

    #[test]
    fn sweeps() {
        let spec = ScenarioSpec::default();
        assert!(pressure_sweep(ActuatorKind::Cpam, &[], &spec, &cfg()).unwrap().is_empty());
        let jobs = pressure_sweep(ActuatorKind::Epam, &[10.0, 20.0, 30.0], &spec, &cfg()).unwrap();
        let p: Vec<f64> = jobs.iter().map(|j| j.pressure()).collect();
        assert_eq!(p, vec![10.0, 20.0, 30.0]);
        let jobs = mesh_sweep(ActuatorKind::Spam, &[4.0], &spec, &cfg()).unwrap();
        assert_eq!(jobs[0].spec.mesh_size_actuator, 4.0);
        assert_eq!(jobs[0].spec.mesh_size_beam, 16.0);
    }

    #[test]
    fn builds_are_reproducible() {
        let a = build_benchmark(ActuatorKind::Spam, 20.0, &ScenarioSpec::default(), &cfg()).unwrap();
        let b = build_benchmark(ActuatorKind::Spam, 20.0, &ScenarioSpec::default(), &cfg()).unwrap();
        assert_eq!(a.assembly, b.assembly);
        assert_eq!(a.schedule, b.schedule);
    }

    #[test]
    fn scenario_file_round_trip() {
        let f = ScenarioFile {
            actuator: Some(ActuatorKind::Cpam),
            spec: ScenarioSpec::default(),
            solver: SolverConfig::default(),
        };
        assert_eq!(ScenarioFile::parse(&f.to_toml()).unwrap(), f);
        let partial = ScenarioFile::parse("actuator = \"epam\"\n[spec]\nw = 50.0\n").unwrap();
        assert_eq!(partial.spec.w, 50.0);
        assert_eq!(partial.spec.l_ibr, 360.0);
    }
}
