//! Assembly of the beam and actuator parts into one global mesh with tie
//! constraints and contact pairs.

use std::collections::HashMap;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{open_edges, Mesh, MeshError, SurfaceSet};
use crate::scenarios::ActuatorKind;

/// Default separation between the beam and actuator layers (mm).
pub const DEFAULT_LAYER_GAP: f64 = 0.01;

/// Follower nodes bonded to leader nodes; `pairs` holds the matched
/// `(follower, leader)` global node ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TieConstraint {
    pub leader_set: String,
    pub follower_set: String,
    /// mm
    pub position_tolerance: f64,
    pub pairs: Vec<(usize, usize)>,
}

/// Nodes of `slave_set` may not penetrate the triangles of `master_surface`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactPair {
    pub slave_set: String,
    pub master_surface: String,
    /// Triangles with a node closer than this to the slave node in the
    /// reference configuration are ignored (self contact), mm.
    pub exclusion_radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartRange {
    pub name: String,
    pub node_offset: usize,
    pub node_count: usize,
    pub element_offset: usize,
    pub element_count: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Assembly {
    pub parts: Vec<(String, Mesh)>,
    pub ranges: Vec<PartRange>,
    /// Merged mesh; part sets are prefixed `<part>.`.
    pub mesh: Mesh,
    pub ties: Vec<TieConstraint>,
    pub contact_pairs: Vec<ContactPair>,
    /// mm
    pub layer_gap: f64,
    pub kind: Option<ActuatorKind>,
}

impl Assembly {
    /// Root node of every node after tie elimination.
    pub fn node_map(&self) -> Vec<usize> {
        resolve_ties(self.mesh.nodes.len(), &self.ties).expect("ties validated at build time")
    }

    /// Number of independent nodes after tie elimination.
    pub fn effective_node_count(&self) -> usize {
        let map = self.node_map();
        (0..map.len()).filter(|&i| map[i] == i).count()
    }
}

pub fn build_assembly(beam: Mesh, actuators: Vec<Mesh>, kind: ActuatorKind) -> Result<Assembly, MeshError> {
    build_assembly_with_gap(beam, actuators, kind, DEFAULT_LAYER_GAP)
}

pub fn build_assembly_with_gap(
    beam: Mesh,
    actuators: Vec<Mesh>,
    kind: ActuatorKind,
    layer_gap: f64,
) -> Result<Assembly, MeshError> {
    if !(layer_gap > 0.0) {
        return Err(MeshError::InvalidParameter("layer gap must be positive".into()));
    }
    let n_act = actuators.len();
    let mut parts = vec![("beam".to_string(), beam)];
    for (i, a) in actuators.into_iter().enumerate() {
        let name = if n_act == 1 { "actuator".to_string() } else { format!("actuator{i}") };
        parts.push((name, a));
    }
    let mut mesh = Mesh::default();
    let mut ranges = Vec::new();
    for (name, part) in &parts {
        let (no, eo) = (mesh.nodes.len(), mesh.elements.len());
        for n in &part.nodes {
            mesh.add_node(n.position);
        }
        for e in &part.elements {
            mesh.add_element(e.node_ids.map(|i| i + no), e.material_id, e.thickness, e.fiber_angle);
        }
        for (set, nodes) in &part.node_sets {
            mesh.node_sets
                .insert(format!("{name}.{set}"), nodes.iter().map(|i| i + no).collect());
        }
        for (set, s) in &part.surface_sets {
            let mut s = s.clone();
            s.elements.iter_mut().for_each(|e| *e += eo);
            s.sealed_boundary = s.sealed_boundary.map(|b| format!("{name}.{b}"));
            mesh.surface_sets.insert(format!("{name}.{set}"), s);
        }
        for r in &part.rings {
            mesh.rings.push(super::Ring {
                x: r.x,
                nodes: r.nodes.iter().map(|i| i + no).collect(),
            });
        }
        ranges.push(PartRange {
            name: name.clone(),
            node_offset: no,
            node_count: part.nodes.len(),
            element_offset: eo,
            element_count: part.elements.len(),
        });
    }

    if n_act > 0 {
        check_clearance(&parts, layer_gap)?;
    }

    let tol = 5.0 * layer_gap + 1e-9;
    let mut ties = Vec::new();
    for (name, part) in parts.iter().skip(1) {
        for set in part.node_sets.keys().filter(|s| s.starts_with("tie_")) {
            let follower_set = format!("{name}.{set}");
            let leader_set = "beam.footprint_nodes".to_string();
            let leaders = mesh.node_set(&leader_set)?.to_vec();
            let followers = mesh.node_set(&follower_set)?.to_vec();
            let pairs = match_nodes(&mesh, &followers, &leaders, tol).map_err(|message| MeshError::Tie {
                tie: follower_set.clone(),
                message,
            })?;
            ties.push(TieConstraint {
                leader_set,
                follower_set,
                position_tolerance: tol,
                pairs,
            });
        }
    }
    let map = resolve_ties(mesh.nodes.len(), &ties)?;

    // Assembly-level pressure chambers.
    let mut chamber = SurfaceSet {
        pressurized: true,
        ..SurfaceSet::default()
    };
    for (name, part) in parts.iter().skip(1) {
        let mut k = 0;
        while let Some(s) = part.surface_sets.get(&format!("actuator_interior_{k}")) {
            let mut set = mesh.surface_set(&format!("{name}.actuator_interior_{k}"))?.clone();
            if s.sealed_boundary.is_some() {
                // The beam wall under the pouch closes the chamber.
                let floor = mesh.surface_set(&format!("beam.footprint_{k}"))?;
                set.extend(&SurfaceSet::reversed(floor.elements.clone(), false));
                set.sealed_boundary = None;
            }
            let open = open_edges(&mesh, &set, Some(&map));
            if !open.is_empty() {
                return Err(MeshError::Geometry(format!(
                    "chamber {k} of {name} has {} open edges after welding",
                    open.len()
                )));
            }
            chamber.extend(&set);
            mesh.surface_sets.insert(format!("chamber_{k}"), set);
            k += 1;
        }
    }
    if !chamber.is_empty() {
        mesh.surface_sets.insert("actuator_interior".into(), chamber);
    }
    mesh.surface_sets
        .insert("beam_interior".into(), mesh.surface_set("beam.beam_interior")?.clone());

    let contact_pairs = if n_act > 0 { contact_pairs_for(kind, &parts, &mesh) } else { Vec::new() };
    Ok(Assembly {
        parts,
        ranges,
        mesh,
        ties,
        contact_pairs,
        layer_gap,
        kind: (n_act > 0).then_some(kind),
    })
}

fn contact_pairs_for(kind: ActuatorKind, parts: &[(String, Mesh)], mesh: &Mesh) -> Vec<ContactPair> {
    let spacing = parts
        .iter()
        .skip(1)
        .flat_map(|(_, m)| m.elements.iter().map(|e| e.node_ids))
        .take(1)
        .map(|[a, b, _]| (parts[1].1.position(a) - parts[1].1.position(b)).norm())
        .next()
        .unwrap_or(1.0);
    let pair = |s: &str, m: &str, excl: f64| ContactPair {
        slave_set: s.into(),
        master_surface: m.into(),
        exclusion_radius: excl,
    };
    let mut v = Vec::new();
    for (name, _) in parts.iter().skip(1) {
        let n = |s: &str| format!("{name}.{s}");
        match kind {
            ActuatorKind::Spam => {
                v.push(pair(&n("bottom_nodes"), "beam.sector", 0.0));
                v.push(pair("beam.sector_nodes", &n("bottom"), 0.0));
                v.push(pair(&n("top_nodes"), &n("top"), 2.5 * spacing));
            }
            ActuatorKind::Epam => {
                v.push(pair(&n("outer_nodes"), &n("outer"), 2.5 * spacing));
            }
            ActuatorKind::Cpam => {
                v.push(pair(&n("gusset_a_nodes"), &n("gusset_b"), 0.0));
                v.push(pair(&n("gusset_b_nodes"), &n("gusset_a"), 0.0));
                v.push(pair(&n("outer_nodes"), &n("outer"), 2.5 * spacing));
            }
            ActuatorKind::Fpam => {
                v.push(pair(&n("bottom_nodes"), "beam.sector", 0.0));
                v.push(pair("beam.sector_nodes", &n("bottom"), 0.0));
            }
        }
    }
    v.retain(|p| mesh.node_sets.contains_key(&p.slave_set) && mesh.surface_sets.contains_key(&p.master_surface));
    v
}

/// Every actuator node must lie at least half a gap outside the beam wall.
fn check_clearance(parts: &[(String, Mesh)], gap: f64) -> Result<(), MeshError> {
    let beam = &parts[0].1;
    let radius = beam
        .rings
        .first()
        .map(|r| {
            let p = beam.position(r.nodes[0]);
            (p.y * p.y + p.z * p.z).sqrt()
        })
        .ok_or_else(|| MeshError::Geometry("beam mesh carries no rings".into()))?;
    for (name, part) in parts.iter().skip(1) {
        for n in &part.nodes {
            let rr = (n.position.y * n.position.y + n.position.z * n.position.z).sqrt();
            if rr < radius + 0.5 * gap {
                return Err(MeshError::Geometry(format!(
                    "{name} node {} overlaps the beam wall (radius {rr:.4} < {radius:.4} + gap/2)",
                    n.id
                )));
            }
        }
    }
    Ok(())
}

/// Nearest leader within `tol` for each follower; fails if a follower has
/// none, or two followers share a leader.
fn match_nodes(mesh: &Mesh, followers: &[usize], leaders: &[usize], tol: f64) -> Result<Vec<(usize, usize)>, String> {
    let cell = tol.max(1e-6);
    let key = |p: &Vector3<f64>| {
        (
            (p.x / cell).floor() as i64,
            (p.y / cell).floor() as i64,
            (p.z / cell).floor() as i64,
        )
    };
    let mut grid: HashMap<(i64, i64, i64), Vec<usize>> = HashMap::new();
    for &l in leaders {
        grid.entry(key(&mesh.position(l))).or_default().push(l);
    }
    let mut used: HashMap<usize, usize> = HashMap::new();
    let mut pairs = Vec::with_capacity(followers.len());
    for &f in followers {
        let p = mesh.position(f);
        let (i, j, k) = key(&p);
        let mut best: Option<(f64, usize)> = None;
        for di in -1..=1 {
            for dj in -1..=1 {
                for dk in -1..=1 {
                    for &l in grid.get(&(i + di, j + dj, k + dk)).into_iter().flatten() {
                        let d = (mesh.position(l) - p).norm();
                        if d <= tol && best.map_or(true, |b| d < b.0) {
                            best = Some((d, l));
                        }
                    }
                }
            }
        }
        let (_, l) = best.ok_or_else(|| format!("follower node {f} has no leader within {tol} mm"))?;
        if let Some(other) = used.insert(l, f) {
            return Err(format!("followers {other} and {f} both match leader {l}"));
        }
        pairs.push((f, l));
    }
    Ok(pairs)
}

/// Root of every node after chaining follower → leader links.
pub fn resolve_ties(n: usize, ties: &[TieConstraint]) -> Result<Vec<usize>, MeshError> {
    let mut parent: Vec<usize> = (0..n).collect();
    for t in ties {
        for &(f, l) in &t.pairs {
            if parent[f] != f && parent[f] != l {
                return Err(MeshError::Tie {
                    tie: t.follower_set.clone(),
                    message: format!("node {f} is follower in two ties"),
                });
            }
            parent[f] = l;
        }
    }
    let mut root = vec![0; n];
    for i in 0..n {
        let mut r = i;
        let mut steps = 0;
        while parent[r] != r {
            r = parent[r];
            steps += 1;
            if steps > n {
                return Err(MeshError::Tie {
                    tie: "chain".into(),
                    message: format!("cyclic tie through node {i}"),
                });
            }
        }
        root[i] = r;
    }
    Ok(root)
}
