//! Membrane meshes for the beam body and the actuator families.

pub mod actuator;
pub mod assembly;
pub mod cylinder;
pub mod layout;
pub mod vtk;
mod zip;

use std::collections::{BTreeMap, HashMap};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use actuator::generate_actuator;
pub use assembly::{build_assembly, build_assembly_with_gap, resolve_ties, Assembly, ContactPair, PartRange, TieConstraint};
pub use cylinder::{generate_beam, generate_cylinder};
pub use layout::CylinderLayout;

/// Material slot of the TPU-coated nylon.
pub const MAT_TPU: usize = 0;
/// Material slot of the silicone-coated nylon.
pub const MAT_SILICONE: usize = 1;
/// Material slot of the glued silicone-nylon composite.
pub const MAT_GLUE: usize = 2;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("invalid mesh parameter: {0}")]
    InvalidParameter(String),
    #[error("geometry error: {0}")]
    Geometry(String),
    #[error("tie {tie}: {message}")]
    Tie { tie: String, message: String },
    #[error("unknown set `{0}`")]
    UnknownSet(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub id: usize,
    /// mm
    pub position: Vector3<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MembraneElement {
    pub node_ids: [usize; 3],
    pub material_id: usize,
    /// µm
    pub thickness: f64,
    /// In-plane fill-yarn angle (degrees) measured from the projection of
    /// the beam axis onto the element plane.
    pub fiber_angle: f64,
}

/// Named list of elements with per-element orientation flags. A reversed
/// element contributes with its normal flipped.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SurfaceSet {
    pub elements: Vec<usize>,
    pub reversed: Vec<bool>,
    /// Pressurised surfaces must be closed.
    pub pressurized: bool,
    /// Node set sealing an intentionally open pressurised surface.
    pub sealed_boundary: Option<String>,
}

impl SurfaceSet {
    pub fn new(elements: Vec<usize>, pressurized: bool) -> Self {
        let reversed = vec![false; elements.len()];
        Self {
            elements,
            reversed,
            pressurized,
            sealed_boundary: None,
        }
    }

    pub fn reversed(elements: Vec<usize>, pressurized: bool) -> Self {
        let reversed = vec![true; elements.len()];
        Self {
            elements,
            reversed,
            pressurized,
            sealed_boundary: None,
        }
    }

    pub fn extend(&mut self, other: &SurfaceSet) {
        self.elements.extend_from_slice(&other.elements);
        self.reversed.extend_from_slice(&other.reversed);
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, bool)> + '_ {
        self.elements.iter().copied().zip(self.reversed.iter().copied())
    }
}

/// Cross-section ring of the beam: nodes of a regular polygon at one axial
/// station, ordered by angle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ring {
    pub x: f64,
    pub nodes: Vec<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Mesh {
    pub nodes: Vec<Node>,
    pub elements: Vec<MembraneElement>,
    pub node_sets: BTreeMap<String, Vec<usize>>,
    pub surface_sets: BTreeMap<String, SurfaceSet>,
    /// Centerline rings, root to tip (beam meshes only).
    pub rings: Vec<Ring>,
}

impl Mesh {
    pub fn add_node(&mut self, p: Vector3<f64>) -> usize {
        let id = self.nodes.len();
        self.nodes.push(Node { id, position: p });
        id
    }

    pub fn add_element(&mut self, node_ids: [usize; 3], material_id: usize, thickness: f64, fiber_angle: f64) -> usize {
        self.elements.push(MembraneElement {
            node_ids,
            material_id,
            thickness,
            fiber_angle,
        });
        self.elements.len() - 1
    }

    /// Adds a triangle whose normal points along `dir` (at its centroid).
    pub(crate) fn add_oriented(
        &mut self,
        mut tri: [usize; 3],
        dir: impl Fn(Vector3<f64>) -> Vector3<f64>,
        material_id: usize,
        thickness: f64,
        fiber_angle: f64,
    ) -> usize {
        let [a, b, c] = tri.map(|i| self.nodes[i].position);
        let n = (b - a).cross(&(c - a));
        if n.dot(&dir((a + b + c) / 3.0)) < 0.0 {
            tri.swap(1, 2);
        }
        self.add_element(tri, material_id, thickness, fiber_angle)
    }

    pub fn position(&self, node: usize) -> Vector3<f64> {
        self.nodes[node].position
    }

    pub fn element_area(&self, e: usize) -> f64 {
        let [a, b, c] = self.elements[e].node_ids.map(|i| self.nodes[i].position);
        0.5 * (b - a).cross(&(c - a)).norm()
    }

    pub fn element_normal(&self, e: usize) -> Vector3<f64> {
        let [a, b, c] = self.elements[e].node_ids.map(|i| self.nodes[i].position);
        (b - a).cross(&(c - a)).normalize()
    }

    pub fn total_area(&self) -> f64 {
        (0..self.elements.len()).map(|e| self.element_area(e)).sum()
    }

    pub fn node_set(&self, name: &str) -> Result<&[usize], MeshError> {
        self.node_sets
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| MeshError::UnknownSet(name.to_string()))
    }

    pub fn surface_set(&self, name: &str) -> Result<&SurfaceSet, MeshError> {
        self.surface_sets
            .get(name)
            .ok_or_else(|| MeshError::UnknownSet(name.to_string()))
    }

    /// Distinct nodes referenced by the elements of a surface set, sorted.
    pub fn surface_nodes(&self, set: &SurfaceSet) -> Vec<usize> {
        let mut v: Vec<usize> = set
            .elements
            .iter()
            .flat_map(|&e| self.elements[e].node_ids)
            .collect();
        v.sort_unstable();
        v.dedup();
        v
    }
}

/// Edges of `set` whose oriented uses do not cancel. Every edge of a closed
/// oriented surface is traversed equally often in both directions; shared
/// weld seams between chambers are allowed. `remap` resolves tied nodes.
pub fn open_edges(mesh: &Mesh, set: &SurfaceSet, remap: Option<&[usize]>) -> Vec<(usize, usize)> {
    let mut count: HashMap<(usize, usize), i64> = HashMap::new();
    for (e, rev) in set.iter() {
        let mut ids = mesh.elements[e].node_ids;
        if let Some(map) = remap {
            ids = ids.map(|i| map[i]);
        }
        if rev {
            ids.swap(1, 2);
        }
        for k in 0..3 {
            let (a, b) = (ids[k], ids[(k + 1) % 3]);
            if a == b {
                continue;
            }
            let (key, s) = if a < b { ((a, b), 1) } else { ((b, a), -1) };
            *count.entry(key).or_insert(0) += s;
        }
    }
    let mut open: Vec<_> = count.into_iter().filter(|(_, c)| *c != 0).map(|(k, _)| k).collect();
    open.sort_unstable();
    open
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsReport {
    pub element_count: usize,
    pub node_count: usize,
    pub min_area: f64,
    pub max_area: f64,
    /// Largest ratio of longest edge to smallest altitude.
    pub max_aspect_ratio: f64,
    pub duplicate_nodes: Vec<(usize, usize)>,
    /// `(surface set, number of open edges)` for each failing pressurised set.
    pub open_surfaces: Vec<(String, usize)>,
    pub degenerate_elements: Vec<usize>,
    pub passed: bool,
}

/// Nodes closer than this are reported as duplicates (mm).
pub const DUPLICATE_TOLERANCE: f64 = 1e-6;

pub fn validate_mesh(mesh: &Mesh) -> DiagnosticsReport {
    let mut min_area = f64::INFINITY;
    let mut max_area: f64 = 0.0;
    let mut max_aspect: f64 = 0.0;
    let mut degenerate = Vec::new();
    for (e, el) in mesh.elements.iter().enumerate() {
        let [a, b, c] = el.node_ids.map(|i| mesh.nodes[i].position);
        let area = 0.5 * (b - a).cross(&(c - a)).norm();
        let distinct = el.node_ids[0] != el.node_ids[1]
            && el.node_ids[1] != el.node_ids[2]
            && el.node_ids[0] != el.node_ids[2];
        if !distinct || !(area > 0.0) {
            degenerate.push(e);
            continue;
        }
        min_area = min_area.min(area);
        max_area = max_area.max(area);
        let longest = [(b - a).norm(), (c - b).norm(), (a - c).norm()]
            .into_iter()
            .fold(0.0, f64::max);
        max_aspect = max_aspect.max(longest * longest / (2.0 * area));
    }
    if mesh.elements.is_empty() {
        min_area = 0.0;
    }
    let duplicate_nodes = find_duplicates(mesh, DUPLICATE_TOLERANCE);
    let open_surfaces: Vec<_> = mesh
        .surface_sets
        .iter()
        .filter(|(_, s)| s.pressurized && s.sealed_boundary.is_none())
        .filter_map(|(name, s)| {
            let n = open_edges(mesh, s, None).len();
            (n > 0).then(|| (name.clone(), n))
        })
        .collect();
    let passed = degenerate.is_empty() && duplicate_nodes.is_empty() && open_surfaces.is_empty();
    DiagnosticsReport {
        element_count: mesh.elements.len(),
        node_count: mesh.nodes.len(),
        min_area,
        max_area,
        max_aspect_ratio: max_aspect,
        duplicate_nodes,
        open_surfaces,
        degenerate_elements: degenerate,
        passed,
    }
}

fn find_duplicates(mesh: &Mesh, tol: f64) -> Vec<(usize, usize)> {
    let cell = tol.max(1e-9) * 4.0;
    let key = |p: &Vector3<f64>| {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for n in &mesh.nodes {
        grid.entry(key(&n.position)).or_default().push(n.id);
    }
    let mut dup = Vec::new();
    for n in &mesh.nodes {
        let (i, j, k) = key(&n.position);
        for di in -1..=1 {
            for dj in -1..=1 {
                for dk in -1..=1 {
                    if let Some(list) = grid.get(&(i + di, j + dj, k + dk)) {
                        for &m in list {
                            if m > n.id && (mesh.nodes[m].position - n.position).norm() < tol {
                                dup.push((n.id, m));
                            }
                        }
                    }
                }
            }
        }
    }
    dup.sort_unstable();
    dup
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tetra() -> Mesh {
        let mut m = Mesh::default();
        for p in [
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.0, 0.0, 0.0),
            Vector3::new(0.0, 1.0, 0.0),
            Vector3::new(0.0, 0.0, 1.0),
        ] {
            m.add_node(p);
        }
        let centroid = Vector3::new(0.25, 0.25, 0.25);
        for tri in [[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]] {
            m.add_oriented(tri, |p| p - centroid, MAT_TPU, 200.0, 0.0);
        }
        let all: Vec<usize> = (0..4).collect();
        m.surface_sets.insert("interior".into(), SurfaceSet::new(all, true));
        m
    }

    #[test]
    fn closed_tetrahedron_passes() {
        let r = validate_mesh(&tetra());
        assert!(r.passed, "{r:?}");
    }

    #[test]
    fn deleted_element_opens_surface() {
        let mut m = tetra();
        m.surface_sets.get_mut("interior").unwrap().elements.pop();
        m.surface_sets.get_mut("interior").unwrap().reversed.pop();
        let r = validate_mesh(&m);
        assert!(!r.passed);
        assert_eq!(r.open_surfaces, vec![("interior".to_string(), 3)]);
    }

    #[test]
    fn coincident_nodes_reported() {
        let mut m = tetra();
        m.add_node(Vector3::new(1e-9, 0.0, 0.0));
        let r = validate_mesh(&m);
        assert_eq!(r.duplicate_nodes, vec![(0, 4)]);
        assert!(!r.passed);
    }

    #[test]
    fn inconsistent_orientation_is_open() {
        let mut m = tetra();
        m.elements[0].node_ids.swap(1, 2);
        assert!(!validate_mesh(&m).passed);
    }
}
