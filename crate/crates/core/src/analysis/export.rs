//! VTK series and summary CSV for a trajectory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::{von_mises_field, AnalysisError, BendingPlane, Frame, Trajectory};
use crate::mesh::vtk::{render, VtkData};
use crate::mesh::Mesh;

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> AnalysisError + '_ {
    move |source| AnalysisError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes one frame as `<stem>_<index>.vtk` in `dir`: deformed positions,
/// displacement, von Mises stress and material id.
pub fn export_frame_vtk(
    mesh: &Mesh,
    reference: &[nalgebra::Vector3<f64>],
    frame: &Frame,
    dir: &Path,
    stem: &str,
    index: usize,
) -> Result<PathBuf, AnalysisError> {
    let path = dir.join(format!("{stem}_{index:03}.vtk"));
    let cells: Vec<[usize; 3]> = mesh.elements.iter().map(|e| e.node_ids).collect();
    let positions = frame.positions(reference);
    let vm = von_mises_field(frame);
    let data = VtkData {
        point_vectors: vec![("displacement", &frame.displacements)],
        cell_scalars: vec![("von_mises_MPa", &vm)],
        cell_ints: vec![("material_id", mesh.elements.iter().map(|e| e.material_id as i64).collect())],
    };
    let text = render(&format!("{stem} t={}", frame.time), &positions, &cells, &data);
    std::fs::write(&path, text).map_err(io_err(&path))?;
    Ok(path)
}

/// Summary CSV text: one row per frame with energies, in-plane marker
/// displacements and the quasi-static flag.
pub fn summary_csv(trajectory: &Trajectory, markers: &[usize], plane: &BendingPlane) -> String {
    let mut s = String::from("time,KE_mJ,IE_mJ,Wext_mJ");
    for k in 1..=markers.len() {
        let _ = write!(s, ",marker{k}_dx,marker{k}_dy");
    }
    s.push_str(",quasistatic\n");
    for f in &trajectory.frames {
        let e = &f.energy;
        let _ = write!(s, "{},{},{},{}", f.time, e.kinetic, e.internal_strain, e.external_work);
        for &m in markers {
            let [dx, dy] = plane.project(&f.displacements[m]);
            let _ = write!(s, ",{dx},{dy}");
        }
        let _ = writeln!(s, ",{}", u8::from(f.quasi_static));
    }
    s
}

pub fn write_summary_csv(
    trajectory: &Trajectory,
    markers: &[usize],
    plane: &BendingPlane,
    path: &Path,
) -> Result<(), AnalysisError> {
    std::fs::write(path, summary_csv(trajectory, markers, plane)).map_err(io_err(path))
}

/// VTK file per frame plus `<stem>_summary.csv`. Returns every written path.
pub fn export_trajectory(
    mesh: &Mesh,
    trajectory: &Trajectory,
    markers: &[usize],
    plane: &BendingPlane,
    dir: &Path,
    stem: &str,
) -> Result<Vec<PathBuf>, AnalysisError> {
    std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut out = Vec::with_capacity(trajectory.frames.len() + 1);
    for (i, f) in trajectory.frames.iter().enumerate() {
        out.push(export_frame_vtk(mesh, &trajectory.reference, f, dir, stem, i + 1)?);
    }
    let csv = dir.join(format!("{stem}_summary.csv"));
    write_summary_csv(trajectory, markers, plane, &csv)?;
    out.push(csv);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::EnergyLedger;
    use nalgebra::Vector3;

    fn fixture() -> (Mesh, Trajectory) {
        let mesh = crate::mesh::generate_cylinder(40.0, 20.0, 5.0, 0.2).unwrap();
        let reference: Vec<Vector3<f64>> = mesh.nodes.iter().map(|n| n.position).collect();
        let frames = (1..=3)
            .map(|k| Frame {
                time: 0.1 * k as f64,
                displacements: reference.iter().map(|p| Vector3::new(0.0, 0.01 * k as f64 * p.x, 0.0)).collect(),
                stress: vec![[0.1 * k as f64, 0.2, 0.0]; mesh.elements.len()],
                energy: EnergyLedger {
                    kinetic: 0.001,
                    internal_strain: k as f64,
                    external_work: k as f64,
                    ..Default::default()
                },
                quasi_static: k > 1,
            })
            .collect();
        (
            mesh,
            Trajectory {
                reference,
                frames,
                time_step: 1e-4,
                steps: 3000,
            },
        )
    }

    #[test]
    fn summary_schema() {
        let (mesh, t) = fixture();
        let markers = mesh.node_sets["centerline_markers"].clone();
        let csv = summary_csv(&t, &markers, &BendingPlane::default());
        let mut lines = csv.lines();
        let mut header = String::from("time,KE_mJ,IE_mJ,Wext_mJ");
        for k in 1..=6 {
            header.push_str(&format!(",marker{k}_dx,marker{k}_dy"));
        }
        header.push_str(",quasistatic");
        assert_eq!(lines.next().unwrap(), header);
        let rows: Vec<&str> = lines.collect();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].ends_with(",0") && rows[2].ends_with(",1"));
        assert_eq!(rows[0].split(',').count(), 17);
    }

    #[test]
    fn one_vtk_per_frame_and_byte_identical_reexport() {
        let (mesh, t) = fixture();
        let markers = mesh.node_sets["centerline_markers"].clone();
        let dir = tempfile::tempdir().unwrap();
        let files = export_trajectory(&mesh, &t, &markers, &BendingPlane::default(), dir.path(), "cpam_30kPa").unwrap();
        assert_eq!(files.len(), 4);
        assert!(files[0].ends_with("cpam_30kPa_001.vtk"));
        assert!(files[3].ends_with("cpam_30kPa_summary.csv"));
        let first: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(f).unwrap()).collect();
        export_trajectory(&mesh, &t, &markers, &BendingPlane::default(), dir.path(), "cpam_30kPa").unwrap();
        let second: Vec<Vec<u8>> = files.iter().map(|f| std::fs::read(f).unwrap()).collect();
        assert_eq!(first, second);
        let vtk = String::from_utf8(first[0].clone()).unwrap();
        assert!(vtk.contains("VECTORS displacement double"));
        assert!(vtk.contains("SCALARS von_mises_MPa double 1"));
        assert!(vtk.contains("SCALARS material_id int 1"));
    }

    #[test]
    fn unwritable_directory_reports_path() {
        let (mesh, t) = fixture();
        let dir = tempfile::tempdir().unwrap();
        let blocker = dir.path().join("file");
        std::fs::write(&blocker, "x").unwrap();
        let err = export_trajectory(&mesh, &t, &[0], &BendingPlane::default(), &blocker.join("sub"), "s").unwrap_err();
        assert!(err.to_string().contains("file"));
    }
}
