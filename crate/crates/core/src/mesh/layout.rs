//! Structured (angle, axial-station) grid shared by the beam and the
//! actuator layers, so that welded layers have coincident nodes.
//!
//! Angles are measured from +y towards +z: a point of radius `R` sits at
//! `(x, R cos φ, R sin φ)`. The actuator sector is centred on φ = 0.

use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;

use super::MeshError;

/// Axial and angular extent of a refined actuator footprint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FootprintRequest {
    /// Circumferential width (mm).
    pub width: f64,
    pub x_start: f64,
    pub segment_length: f64,
    pub segments: usize,
    pub mesh_size: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CylinderLayout {
    pub length: f64,
    pub radius: f64,
    /// Column angles in increasing order; the fine sector, if any, comes
    /// first and starts at its lower edge.
    pub phis: Vec<f64>,
    /// Columns forming a regular polygon, in angular order.
    pub polygon: Vec<usize>,
    /// Inclusive range of fine columns.
    pub sector: Option<(usize, usize)>,
    /// Stations carried by every column.
    pub x_coarse: Vec<f64>,
    /// Stations carried by the fine columns (superset of `x_coarse`).
    pub x_fine: Vec<f64>,
    /// Index in `x_fine` of each coarse station.
    pub coarse_in_fine: Vec<usize>,
    /// Indices in `x_fine` of the footprint segment boundaries.
    pub segment_breaks: Vec<usize>,
}

impl CylinderLayout {
    pub fn uniform(length: f64, radius: f64, mesh_size: f64) -> Result<Self, MeshError> {
        check_base(length, radius, mesh_size)?;
        // Multiple of 4 so that the ±z side lines carry nodes.
        let n = (TAU * radius / mesh_size).ceil() as usize;
        let n = n.div_ceil(4).max(2) * 4;
        let phis: Vec<f64> = (0..n).map(|i| TAU * i as f64 / n as f64).collect();
        let x = uniform_stations(0.0, length, mesh_size);
        Ok(Self {
            length,
            radius,
            polygon: (0..n).collect(),
            phis,
            sector: None,
            coarse_in_fine: (0..x.len()).collect(),
            x_coarse: x.clone(),
            x_fine: x,
            segment_breaks: Vec::new(),
        })
    }

    pub fn with_footprint(length: f64, radius: f64, mesh_size: f64, fp: &FootprintRequest) -> Result<Self, MeshError> {
        check_base(length, radius, mesh_size)?;
        if !(fp.mesh_size > 0.0) || fp.mesh_size > mesh_size {
            return Err(MeshError::InvalidParameter(format!(
                "footprint mesh size {} must lie in (0, {mesh_size}]",
                fp.mesh_size
            )));
        }
        let x_end = fp.x_start + fp.segment_length * fp.segments as f64;
        if fp.segments == 0 || fp.x_start < 0.0 || x_end > length + 1e-9 {
            return Err(MeshError::InvalidParameter("footprint outside the beam".into()));
        }
        if !(fp.width > 0.0) || fp.width >= PI * radius {
            return Err(MeshError::InvalidParameter(format!("footprint width {} out of range", fp.width)));
        }

        // Coarse polygon count chosen so the footprint spans a whole number
        // of coarse cells as closely as possible.
        let n0 = (TAU * radius / mesh_size).ceil() as usize;
        let mut best: Option<(f64, usize, usize)> = None;
        for n in n0.max(6)..=((n0 as f64 * 1.3).ceil() as usize).max(n0 + 1) {
            let cell = TAU * radius / n as f64;
            let k = ((fp.width / cell).round() as usize).max(1);
            if k + 2 > n {
                continue;
            }
            let err = (k as f64 * cell - fp.width).abs();
            if best.map_or(true, |b| err < b.0 - 1e-12) {
                best = Some((err, n, k));
            }
        }
        let (_, n, k) = best.ok_or_else(|| MeshError::InvalidParameter("footprint too wide".into()))?;
        let dphi = TAU / n as f64;
        let m_phi = ((dphi * radius) / fp.mesh_size).ceil() as usize;
        let lo = -0.5 * k as f64 * dphi;
        let mut phis = Vec::new();
        let mut polygon = Vec::new();
        for i in 0..=k * m_phi {
            if i % m_phi == 0 {
                polygon.push(phis.len());
            }
            phis.push(lo + dphi * i as f64 / m_phi as f64);
        }
        for j in (k + 1)..n {
            polygon.push(phis.len());
            phis.push(lo + dphi * j as f64);
        }

        // Axial stations: coarse ends, fine footprint with every m-th fine
        // station promoted to coarse.
        let m_x = ((mesh_size / fp.mesh_size).round() as usize).max(1);
        let per_seg = m_x * (fp.segment_length / (m_x as f64 * fp.mesh_size)).ceil() as usize;
        let mut x_fine = Vec::new();
        let mut is_coarse = Vec::new();
        let mut segment_breaks = Vec::new();
        if fp.x_start > 0.0 {
            for x in uniform_stations(0.0, fp.x_start, mesh_size) {
                x_fine.push(x);
                is_coarse.push(true);
            }
            x_fine.pop();
            is_coarse.pop();
        }
        for s in 0..fp.segments {
            let a = fp.x_start + fp.segment_length * s as f64;
            for i in 0..per_seg {
                if i == 0 {
                    segment_breaks.push(x_fine.len());
                }
                x_fine.push(a + fp.segment_length * i as f64 / per_seg as f64);
                is_coarse.push(i % m_x == 0);
            }
        }
        segment_breaks.push(x_fine.len());
        if x_end < length - 1e-9 {
            for x in uniform_stations(x_end, length, mesh_size) {
                x_fine.push(x);
                is_coarse.push(true);
            }
        } else {
            x_fine.push(length);
            is_coarse.push(true);
        }
        let coarse_in_fine: Vec<usize> = (0..x_fine.len()).filter(|&i| is_coarse[i]).collect();
        let x_coarse = coarse_in_fine.iter().map(|&i| x_fine[i]).collect();
        Ok(Self {
            length,
            radius,
            phis,
            polygon,
            sector: Some((0, k * m_phi)),
            x_coarse,
            x_fine,
            coarse_in_fine,
            segment_breaks,
        })
    }

    pub fn is_fine(&self, column: usize) -> bool {
        self.sector.is_some_and(|(a, b)| column >= a && column <= b)
    }

    /// Stations carried by `column`.
    pub fn stations(&self, column: usize) -> &[f64] {
        if self.is_fine(column) {
            &self.x_fine
        } else {
            &self.x_coarse
        }
    }

    /// Arc-length width actually covered by the sector (mm).
    pub fn sector_width(&self) -> f64 {
        match self.sector {
            Some((a, b)) => (self.phis[b] - self.phis[a]) * self.radius,
            None => 0.0,
        }
    }

    /// Footprint station range `(first, last)` in `x_fine`.
    pub fn footprint_range(&self) -> Option<(usize, usize)> {
        Some((*self.segment_breaks.first()?, *self.segment_breaks.last()?))
    }

    pub fn point(&self, phi: f64, x: f64, radius: f64) -> Vector3<f64> {
        Vector3::new(x, radius * phi.cos(), radius * phi.sin())
    }
}

fn check_base(length: f64, radius: f64, mesh_size: f64) -> Result<(), MeshError> {
    if !(length > 0.0 && radius > 0.0 && mesh_size > 0.0) {
        return Err(MeshError::InvalidParameter(
            "length, diameter and mesh size must be positive".into(),
        ));
    }
    if mesh_size >= 2.0 * radius {
        return Err(MeshError::InvalidParameter(format!(
            "mesh size {mesh_size} must be below the diameter {}",
            2.0 * radius
        )));
    }
    Ok(())
}

/// Stations `a, …, b` with spacing at most `h`.
fn uniform_stations(a: f64, b: f64, h: f64) -> Vec<f64> {
    let n = ((b - a) / h).ceil().max(1.0) as usize;
    (0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }).collect()
}
