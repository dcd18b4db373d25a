//! Post-processing of trajectories: centerline, marker displacements,
//! accuracy against measured markers, stress measures and exports.

pub mod experiment;
pub mod export;

use log::warn;
use nalgebra::Vector3;
use thiserror::Error;

pub use crate::solver::{Frame, Trajectory};
pub use experiment::{read_experimental_csv, parse_experimental_csv, ExperimentalRecord};
pub use export::{export_frame_vtk, export_trajectory, summary_csv, write_summary_csv};

use crate::mesh::{Assembly, Ring};

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("time {time} s outside the trajectory [0, {end}] s")]
    TimeOutOfRange { time: f64, end: f64 },
    #[error("mesh carries no centerline rings")]
    MissingRings,
    #[error("expected {expected} markers, found {found}")]
    MarkerCount { expected: usize, found: usize },
    #[error("{path}: line {line}: {message}")]
    Parse { path: String, line: u64, message: String },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

/// Plane spanned by the beam axis and the direction towards the actuator;
/// "vertical" means along `up`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BendingPlane {
    pub axis: Vector3<f64>,
    pub up: Vector3<f64>,
}

impl Default for BendingPlane {
    fn default() -> Self {
        Self {
            axis: Vector3::x(),
            up: Vector3::y(),
        }
    }
}

impl BendingPlane {
    /// Plane through the beam axis and the centroid of the actuator nodes.
    pub fn from_assembly(assembly: &Assembly) -> Self {
        let Some(r) = assembly.ranges.get(1) else {
            return Self::default();
        };
        let nodes = &assembly.mesh.nodes[r.node_offset..r.node_offset + r.node_count];
        let c: Vector3<f64> = nodes.iter().map(|n| n.position).sum::<Vector3<f64>>() / nodes.len() as f64;
        let radial = Vector3::new(0.0, c.y, c.z);
        if radial.norm() > 0.0 {
            Self {
                axis: Vector3::x(),
                up: radial.normalize(),
            }
        } else {
            Self::default()
        }
    }

    pub fn project(&self, v: &Vector3<f64>) -> [f64; 2] {
        [v.dot(&self.axis), v.dot(&self.up)]
    }
}

/// Centroid of every ring projected to the bending plane, root to tip.
pub fn centerline_path(positions: &[Vector3<f64>], rings: &[Ring], plane: &BendingPlane) -> Result<Vec<[f64; 2]>, AnalysisError> {
    if rings.is_empty() {
        return Err(AnalysisError::MissingRings);
    }
    Ok(rings
        .iter()
        .map(|r| {
            let c: Vector3<f64> = r.nodes.iter().map(|&n| positions[n]).sum::<Vector3<f64>>() / r.nodes.len() as f64;
            plane.project(&c)
        })
        .collect())
}

/// Reference axial station of every ring (mm).
pub fn ring_stations(rings: &[Ring]) -> Vec<f64> {
    rings.iter().map(|r| r.x).collect()
}

/// In-plane marker displacements at `time`, interpolated linearly between
/// frames. The unloaded state at `t = 0` is the implicit first sample.
pub fn marker_displacement(
    trajectory: &Trajectory,
    markers: &[usize],
    plane: &BendingPlane,
    time: f64,
) -> Result<Vec<[f64; 2]>, AnalysisError> {
    let end = trajectory.frames.last().map_or(0.0, |f| f.time);
    if !(time >= 0.0 && time <= end + 1e-12) {
        return Err(AnalysisError::TimeOutOfRange { time, end });
    }
    let at = |f: Option<&Frame>| -> Vec<[f64; 2]> {
        markers
            .iter()
            .map(|&m| f.map_or([0.0, 0.0], |f| plane.project(&f.displacements[m])))
            .collect()
    };
    let frames = &trajectory.frames;
    let k = frames.partition_point(|f| f.time < time);
    if k < frames.len() && frames[k].time == time {
        return Ok(at(Some(&frames[k])));
    }
    let (t0, a) = if k == 0 { (0.0, at(None)) } else { (frames[k - 1].time, at(Some(&frames[k - 1]))) };
    let Some(next) = frames.get(k) else {
        return Ok(a);
    };
    let b = at(Some(next));
    let w = (time - t0) / (next.time - t0);
    Ok(a.iter()
        .zip(&b)
        .map(|(p, q)| [p[0] + w * (q[0] - p[0]), p[1] + w * (q[1] - p[1])])
        .collect())
}

/// Accuracy `a = 1 − mean(((y_fea − y_exp)/y_fea)²)`. Pairs with
/// `y_fea = 0` are left out of the mean; the count of excluded pairs is
/// returned alongside.
pub fn accuracy_from_values(y_fea: &[f64], y_exp: &[f64]) -> (f64, usize) {
    let mut sum = 0.0;
    let mut used = 0;
    let mut excluded = 0;
    for (&f, &e) in y_fea.iter().zip(y_exp) {
        if f == 0.0 {
            excluded += 1;
            continue;
        }
        sum += ((f - e) / f).powi(2);
        used += 1;
    }
    if excluded > 0 {
        warn!("{excluded} marker(s) with zero simulated displacement left out of the accuracy");
    }
    if used == 0 {
        return (f64::NAN, excluded);
    }
    (1.0 - sum / used as f64, excluded)
}

/// Vertical displacement of the simulated centerline at the station
/// nearest to each marker's reference station.
pub fn centerline_at_markers(
    reference_path: &[[f64; 2]],
    deformed_path: &[[f64; 2]],
    marker_stations: &[f64],
) -> Vec<f64> {
    marker_stations
        .iter()
        .map(|&s| {
            let k = (0..reference_path.len())
                .min_by(|&a, &b| {
                    (reference_path[a][0] - s)
                        .abs()
                        .total_cmp(&(reference_path[b][0] - s).abs())
                })
                .unwrap_or(0);
            deformed_path[k][1] - reference_path[k][1]
        })
        .collect()
}

/// Accuracy of a simulated centerline against one measured record.
pub fn accuracy(
    reference_path: &[[f64; 2]],
    deformed_path: &[[f64; 2]],
    marker_stations: &[f64],
    exp: &ExperimentalRecord,
) -> Result<f64, AnalysisError> {
    if exp.displacements.len() != marker_stations.len() {
        return Err(AnalysisError::MarkerCount {
            expected: marker_stations.len(),
            found: exp.displacements.len(),
        });
    }
    let fea = centerline_at_markers(reference_path, deformed_path, marker_stations);
    let measured: Vec<f64> = exp.displacements.iter().map(|d| d[1]).collect();
    Ok(accuracy_from_values(&fea, &measured).0)
}

/// Plane-stress von Mises stress of `[σ11, σ22, σ12]`.
pub fn von_mises(s: &[f64; 3]) -> f64 {
    (s[0] * s[0] - s[0] * s[1] + s[1] * s[1] + 3.0 * s[2] * s[2]).max(0.0).sqrt()
}

pub fn von_mises_field(frame: &Frame) -> Vec<f64> {
    frame.stress.iter().map(von_mises).collect()
}

/// Largest `|Δy|` over the given markers and the frames at or after
/// `from_time`.
pub fn max_vertical_displacement(trajectory: &Trajectory, markers: &[usize], plane: &BendingPlane, from_time: f64) -> f64 {
    trajectory
        .frames
        .iter()
        .filter(|f| f.time >= from_time)
        .flat_map(|f| markers.iter().map(move |&m| plane.project(&f.displacements[m])[1].abs()))
        .fold(0.0, f64::max)
}

/// Summary of one simulated pressure level.
#[derive(Debug, Clone, PartialEq)]
pub struct AccuracyReport {
    /// kPa
    pub pressure: f64,
    pub accuracy: Option<f64>,
    /// Largest vertical displacement over all markers (mm).
    pub d_max: f64,
    /// Vertical displacement of the tip marker at the end (mm).
    pub d_tip: f64,
    pub quasi_static_ok: bool,
    pub fabric_validity_ok: bool,
    pub energy_residual: f64,
}

impl AccuracyReport {
    pub fn from_run(
        pressure: f64,
        trajectory: &Trajectory,
        markers: &[usize],
        rings: &[Ring],
        plane: &BendingPlane,
        exp: Option<&ExperimentalRecord>,
    ) -> Result<Self, AnalysisError> {
        let last = trajectory.frames.last();
        let d_tip = match (last, markers.last()) {
            (Some(f), Some(&m)) => plane.project(&f.displacements[m])[1],
            _ => 0.0,
        };
        let accuracy = match (exp, last) {
            (Some(e), Some(f)) => {
                let reference = centerline_path(&trajectory.reference, rings, plane)?;
                let deformed = centerline_path(&f.positions(&trajectory.reference), rings, plane)?;
                let stations: Vec<f64> = markers.iter().map(|&m| trajectory.reference[m].x).collect();
                Some(accuracy(&reference, &deformed, &stations, e)?)
            }
            _ => None,
        };
        Ok(Self {
            pressure,
            accuracy,
            d_max: max_vertical_displacement(trajectory, markers, plane, 0.0),
            d_tip,
            quasi_static_ok: trajectory.quasi_static_at_end(),
            fabric_validity_ok: last.map_or(true, |f| f.energy.fabric_validity_violations == 0),
            energy_residual: trajectory.max_energy_residual(),
        })
    }
}

/// Text table with one row per actuator: accuracy per pressure and `d_max`
/// at the highest pressure.
pub fn format_table(rows: &[(String, Vec<AccuracyReport>)]) -> String {
    let mut pressures: Vec<f64> = rows.iter().flat_map(|(_, r)| r.iter().map(|x| x.pressure)).collect();
    pressures.sort_by(f64::total_cmp);
    pressures.dedup();
    let mut out = format!("{:<10}", "actuator");
    for p in &pressures {
        out.push_str(&format!(" {:>10}", format!("a@{p}kPa")));
    }
    out.push_str(&format!(" {:>10} {:>10}\n", "d_max_mm", "d_tip_mm"));
    for (name, reports) in rows {
        out.push_str(&format!("{name:<10}"));
        for p in &pressures {
            let cell = reports
                .iter()
                .find(|r| r.pressure == *p)
                .and_then(|r| r.accuracy)
                .map_or("-".to_string(), |a| format!("{:.1}%", 100.0 * a));
            out.push_str(&format!(" {cell:>10}"));
        }
        let top = reports.iter().max_by(|a, b| a.pressure.total_cmp(&b.pressure));
        match top {
            Some(r) => out.push_str(&format!(" {:>10.1} {:>10.1}\n", r.d_max, r.d_tip)),
            None => out.push_str(&format!(" {:>10} {:>10}\n", "-", "-")),
        }
    }
    out
}
