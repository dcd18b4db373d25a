//! Explicit central-difference integration of the assembled membrane model.
//!
//! Nodal equations of motion `M·a = F_ext + F_contact − F_int − α·M·v` are
//! advanced with the leapfrog form of the central-difference scheme. Tied
//! nodes are eliminated: every element and load refers to the tie root of
//! its nodes, and followers copy the kinematics of their root.

pub mod contact;
pub mod element;
pub mod hinge;
pub mod integrator;
pub mod model;
pub mod schedule;
pub mod trajectory;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::materials::MaterialError;
use crate::mesh::MeshError;

pub use integrator::{run, Solver};
pub use model::{assemble_lumped_mass, stable_time_step, Model};
pub use schedule::{smooth_amplitude, AmplitudeSegment, LoadSchedule, PressureChannel};
pub use trajectory::{Frame, Trajectory};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
    /// The run blew up; `partial` holds the frames recorded before.
    #[error("diverged at t = {time:.6} s (step {step}): {message}")]
    Divergence {
        time: f64,
        step: usize,
        message: String,
        partial: Box<Trajectory>,
    },
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Material(#[from] MaterialError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    /// Fraction of the critical time step actually used.
    pub time_step_safety: f64,
    /// Uniform multiplier on the physical mass (≥ 1).
    pub mass_scaling: f64,
    /// Per-element mass scaling so that no element limits the time step
    /// below this value (s). `None` keeps the uniform scaling only.
    pub target_time_step: Option<f64>,
    /// Mass-proportional damping coefficient (1/s).
    pub damping_alpha: f64,
    /// Penalty per unit penetration and tributary area (N/mm³).
    pub contact_penalty_stiffness: f64,
    /// Fraction of critical damping applied to the normal approach
    /// velocity of active contacts.
    pub contact_damping_ratio: f64,
    /// s
    pub total_time: f64,
    pub frame_count: usize,
    /// Multiplier on the plate bending stiffness of the hinge springs; 0
    /// disables bending.
    pub bending_scale: f64,
    /// Worker threads for element loops; 0 uses the global pool.
    pub threads: usize,
    /// Frames before this time are exempt from the quasi-static check (s).
    pub transient_window: f64,
    /// Kinetic to internal energy ratio below which a frame counts as
    /// quasi-static.
    pub kinetic_ratio_limit: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            time_step_safety: 0.8,
            mass_scaling: 1.0,
            target_time_step: Some(3.0e-5),
            damping_alpha: 20.0,
            contact_penalty_stiffness: 2.0,
            contact_damping_ratio: 0.2,
            total_time: 1.1,
            frame_count: 50,
            bending_scale: 1.0,
            threads: 0,
            transient_window: 0.2,
            kinetic_ratio_limit: 0.01,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidConfig(m.into()));
        if !(self.time_step_safety > 0.0 && self.time_step_safety <= 1.0) {
            return bad("time step safety must lie in (0, 1]");
        }
        if !(self.mass_scaling >= 1.0) {
            return bad("mass scaling must be ≥ 1");
        }
        if self.target_time_step.is_some_and(|t| !(t > 0.0)) {
            return bad("target time step must be positive");
        }
        if !(self.damping_alpha >= 0.0) || !(self.contact_penalty_stiffness >= 0.0) || !(self.bending_scale >= 0.0) {
            return bad("damping, penalty and bending scale must be non-negative");
        }
        if !(0.0..=1.0).contains(&self.contact_damping_ratio) {
            return bad("contact damping ratio must lie in [0, 1]");
        }
        if !(self.total_time > 0.0) || self.frame_count == 0 {
            return bad("total time and frame count must be positive");
        }
        Ok(())
    }
}

/// Running energy account (mJ).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub kinetic: f64,
    /// Membrane strain energy plus hinge bending energy.
    pub internal_strain: f64,
    pub external_work: f64,
    pub contact_penalty: f64,
    pub damping_dissipation: f64,
    /// Elements evaluated outside the fabric data range in the last force
    /// evaluation.
    pub fabric_validity_violations: usize,
}

impl EnergyLedger {
    /// `KE + IE + contact + dissipation − W_ext`.
    pub fn residual(&self) -> f64 {
        self.kinetic + self.internal_strain + self.contact_penalty + self.damping_dissipation - self.external_work
    }

    /// Residual relative to `max(|W_ext|, IE)`; 0 when both vanish.
    pub fn relative_residual(&self) -> f64 {
        let scale = self.external_work.abs().max(self.internal_strain);
        if scale > 0.0 {
            self.residual().abs() / scale
        } else {
            0.0
        }
    }
}

/// Kinematic state. Arrays cover every node; follower entries mirror their
/// tie root.
#[derive(Debug, Clone)]
pub struct SimState {
    /// s
    pub time: f64,
    pub step: usize,
    /// mm
    pub displacements: Vec<nalgebra::Vector3<f64>>,
    /// mm/s, at the last half step.
    pub velocities: Vec<nalgebra::Vector3<f64>>,
    /// mm/s²
    pub accelerations: Vec<nalgebra::Vector3<f64>>,
    /// tonne; zero on tie followers.
    pub lumped_mass: Vec<f64>,
    pub energy: EnergyLedger,
}

impl SimState {
    pub fn at_rest(mass: Vec<f64>) -> Self {
        let n = mass.len();
        Self {
            time: 0.0,
            step: 0,
            displacements: vec![nalgebra::Vector3::zeros(); n],
            velocities: vec![nalgebra::Vector3::zeros(); n],
            accelerations: vec![nalgebra::Vector3::zeros(); n],
            lumped_mass: mass,
            energy: EnergyLedger::default(),
        }
    }
}
