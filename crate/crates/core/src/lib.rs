//! Explicit-dynamics membrane finite element simulator for inflated-beam
//! robots (IBRs) bent by pneumatic actuators.
//!
//! Unit system throughout: mm, N, MPa, tonne, s (energy in mJ = N·mm).
//! Pressures are given in kPa at the public interfaces and converted with
//! [`KPA_TO_MPA`].

pub mod analysis;
pub mod materials;
pub mod mesh;
pub mod scenarios;
pub mod solver;

/// Conversion factor from kPa to MPa.
pub const KPA_TO_MPA: f64 = 1.0e-3;

/// Conversion factor from g/m² to tonne/mm².
pub const GSM_TO_TONNE_PER_MM2: f64 = 1.0e-12;

pub use nalgebra::{Matrix2, Vector2, Vector3};
