//! Sampled simulation output.

use nalgebra::Vector3;

use super::EnergyLedger;

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    /// s
    pub time: f64,
    /// Nodal displacements (mm).
    pub displacements: Vec<Vector3<f64>>,
    /// In-plane Cauchy stress `[σ11, σ22, σ12]` per element (MPa), with
    /// axis 1 along the projected beam axis.
    pub stress: Vec<[f64; 3]>,
    pub energy: EnergyLedger,
    pub quasi_static: bool,
}

impl Frame {
    pub fn positions(&self, reference: &[Vector3<f64>]) -> Vec<Vector3<f64>> {
        reference.iter().zip(&self.displacements).map(|(x, u)| x + u).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    /// Reference nodal positions (mm). The unloaded state at `t = 0` is
    /// implicit and not stored as a frame.
    pub reference: Vec<Vector3<f64>>,
    pub frames: Vec<Frame>,
    /// s
    pub time_step: f64,
    pub steps: usize,
}

impl Trajectory {
    pub fn final_frame(&self) -> Option<&Frame> {
        self.frames.last()
    }

    /// Quasi-static flag at the end of the final pressure hold.
    pub fn quasi_static_at_end(&self) -> bool {
        self.frames.last().is_some_and(|f| f.quasi_static)
    }

    /// Largest relative energy-balance residual over all frames.
    pub fn max_energy_residual(&self) -> f64 {
        self.frames
            .iter()
            .map(|f| f.energy.relative_residual())
            .fold(0.0, f64::max)
    }
}
