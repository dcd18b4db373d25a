//! VTK legacy ASCII output.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;

use super::{Mesh, MeshError};

/// Point and cell data attached to a VTK file.
#[derive(Default)]
pub struct VtkData<'a> {
    pub point_vectors: Vec<(&'a str, &'a [Vector3<f64>])>,
    pub cell_scalars: Vec<(&'a str, &'a [f64])>,
    pub cell_ints: Vec<(&'a str, Vec<i64>)>,
}

/// Renders an unstructured triangle grid. Output is a pure function of the
/// inputs, so re-exports are byte-identical.
pub fn render(title: &str, points: &[Vector3<f64>], cells: &[[usize; 3]], data: &VtkData) -> String {
    let mut s = String::with_capacity(64 * (points.len() + cells.len()));
    let _ = writeln!(s, "# vtk DataFile Version 3.0\n{title}\nASCII\nDATASET UNSTRUCTURED_GRID");
    let _ = writeln!(s, "POINTS {} double", points.len());
    for p in points {
        let _ = writeln!(s, "{:e} {:e} {:e}", p.x, p.y, p.z);
    }
    let _ = writeln!(s, "CELLS {} {}", cells.len(), 4 * cells.len());
    for c in cells {
        let _ = writeln!(s, "3 {} {} {}", c[0], c[1], c[2]);
    }
    let _ = writeln!(s, "CELL_TYPES {}", cells.len());
    for _ in cells {
        s.push_str("5\n");
    }
    if !data.point_vectors.is_empty() {
        let _ = writeln!(s, "POINT_DATA {}", points.len());
        for (name, v) in &data.point_vectors {
            let _ = writeln!(s, "VECTORS {name} double");
            for p in v.iter() {
                let _ = writeln!(s, "{:e} {:e} {:e}", p.x, p.y, p.z);
            }
        }
    }
    if !data.cell_scalars.is_empty() || !data.cell_ints.is_empty() {
        let _ = writeln!(s, "CELL_DATA {}", cells.len());
        for (name, v) in &data.cell_scalars {
            let _ = writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default");
            for x in v.iter() {
                let _ = writeln!(s, "{x:e}");
            }
        }
        for (name, v) in &data.cell_ints {
            let _ = writeln!(s, "SCALARS {name} int 1\nLOOKUP_TABLE default");
            for x in v {
                let _ = writeln!(s, "{x}");
            }
        }
    }
    s
}

pub fn write(path: &Path, contents: &str) -> Result<(), MeshError> {
    std::fs::write(path, contents).map_err(|source| MeshError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Reference mesh with material id and fiber angle per cell.
pub fn export_mesh(mesh: &Mesh, path: &Path) -> Result<(), MeshError> {
    let points: Vec<_> = mesh.nodes.iter().map(|n| n.position).collect();
    let cells: Vec<_> = mesh.elements.iter().map(|e| e.node_ids).collect();
    let angles: Vec<f64> = mesh.elements.iter().map(|e| e.fiber_angle).collect();
    let data = VtkData {
        cell_scalars: vec![("fiber_angle", &angles)],
        cell_ints: vec![("material_id", mesh.elements.iter().map(|e| e.material_id as i64).collect())],
        ..Default::default()
    };
    write(path, &render("membrane mesh", &points, &cells, &data))
}
