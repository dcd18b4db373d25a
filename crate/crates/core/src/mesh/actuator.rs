//! Actuator parts laid over the beam footprint.
//!
//! Every layer is a structured grid on the beam's sector columns and fine
//! axial stations, offset radially by multiples of the layer gap, so welds
//! and glue lines coincide node-for-node with the beam.
//!
//! Node sets whose name starts with `tie_` are welded, taped or glued to the
//! beam by the assembly.

use nalgebra::Vector3;

use super::cylinder::beam_layout;
use super::layout::CylinderLayout;
use super::{Mesh, MeshError, SurfaceSet, MAT_GLUE, MAT_SILICONE, MAT_TPU};
use crate::scenarios::{ActuatorKind, ScenarioSpec};

/// TPU-coated nylon sheet (µm).
pub const TPU_THICKNESS: f64 = 200.0;
/// Silicone-coated nylon sheet (µm).
pub const SILICONE_THICKNESS: f64 = 50.0;
/// In-plane fill angle of the bias-cut fPAM (degrees).
pub const FPAM_FIBER_ANGLE: f64 = 45.0;

struct Grid {
    /// First sector column of the grid.
    i0: usize,
    nodes: Vec<Vec<usize>>,
}

impl Grid {
    fn at(&self, i: usize, j: usize) -> usize {
        self.nodes[i - self.i0][j]
    }

    fn cols(&self) -> std::ops::RangeInclusive<usize> {
        self.i0..=self.i0 + self.nodes.len() - 1
    }
}

struct Ctx<'a> {
    layout: &'a CylinderLayout,
    /// First footprint station in the beam's fine station list.
    f0: usize,
    /// Number of footprint stations.
    nj: usize,
    /// Pouch boundaries, local station indices.
    breaks: Vec<usize>,
    gap: f64,
}

impl Ctx<'_> {
    fn grid(
        &self,
        mesh: &mut Mesh,
        cols: std::ops::RangeInclusive<usize>,
        level: f64,
        reuse: impl Fn(usize, usize) -> Option<usize>,
    ) -> Grid {
        let radius = self.layout.radius + level * self.gap;
        let i0 = *cols.start();
        let nodes = cols
            .map(|i| {
                (0..self.nj)
                    .map(|j| {
                        reuse(i, j).unwrap_or_else(|| {
                            let x = self.layout.x_fine[self.f0 + j];
                            mesh.add_node(self.layout.point(self.layout.phis[i], x, radius))
                        })
                    })
                    .collect()
            })
            .collect();
        Grid { i0, nodes }
    }

    /// Triangulates the grid cells with columns in `cols`; returns the
    /// elements of each pouch. `outward` is +1 for normals pointing away
    /// from the beam axis.
    #[allow(clippy::too_many_arguments)]
    fn sheet(
        &self,
        mesh: &mut Mesh,
        g: &Grid,
        cols: std::ops::Range<usize>,
        outward: f64,
        material: impl Fn(usize) -> usize,
        thickness: f64,
        fiber_angle: f64,
    ) -> Vec<Vec<usize>> {
        let mut per_pouch = vec![Vec::new(); self.breaks.len() - 1];
        let dir = move |p: Vector3<f64>| Vector3::new(0.0, p.y, p.z) * outward;
        for k in 0..self.breaks.len() - 1 {
            for j in self.breaks[k]..self.breaks[k + 1] {
                for i in cols.clone() {
                    let (p00, p01) = (g.at(i, j), g.at(i, j + 1));
                    let (p10, p11) = (g.at(i + 1, j), g.at(i + 1, j + 1));
                    // Same diagonal pattern as the beam wall beneath.
                    let tris = if (i + self.f0 + j) % 2 == 0 {
                        [[p00, p10, p11], [p00, p11, p01]]
                    } else {
                        [[p00, p10, p01], [p10, p11, p01]]
                    };
                    for t in tris {
                        per_pouch[k].push(mesh.add_oriented(t, dir, material(i), thickness, fiber_angle));
                    }
                }
            }
        }
        per_pouch
    }
}

/// Generates the actuator part of `kind` over the footprint described by
/// `dims`. `mesh_size` overrides `dims.mesh_size_actuator`.
pub fn generate_actuator(kind: ActuatorKind, dims: &ScenarioSpec, mesh_size: f64) -> Result<Mesh, MeshError> {
    let mut spec = dims.clone();
    spec.mesh_size_actuator = mesh_size;
    spec.validate(kind)
        .map_err(|e| MeshError::InvalidParameter(e.to_string()))?;
    let layout = beam_layout(&spec)?;
    let (f0, f1) = layout.footprint_range().unwrap();
    let ctx = Ctx {
        layout: &layout,
        f0,
        nj: f1 - f0 + 1,
        breaks: layout.segment_breaks.iter().map(|b| b - f0).collect(),
        gap: spec.layer_gap,
    };
    let (_, ns) = layout.sector.unwrap();
    let mut mesh = Mesh::default();
    match kind {
        ActuatorKind::Spam => spam(&mut mesh, &ctx, ns),
        ActuatorKind::Epam => epam(&mut mesh, &ctx, ns),
        ActuatorKind::Cpam => cpam(&mut mesh, &ctx, ns, &spec)?,
        ActuatorKind::Fpam => fpam(&mut mesh, &ctx, ns, &spec),
    }
    Ok(mesh)
}

fn insert_chambers(mesh: &mut Mesh, per_pouch: Vec<Vec<(usize, bool)>>, sealed: Option<&str>) {
    let mut all = SurfaceSet::default();
    all.pressurized = true;
    all.sealed_boundary = sealed.map(str::to_string);
    for (k, list) in per_pouch.into_iter().enumerate() {
        let set = SurfaceSet {
            elements: list.iter().map(|p| p.0).collect(),
            reversed: list.iter().map(|p| p.1).collect(),
            pressurized: true,
            sealed_boundary: sealed.map(str::to_string),
        };
        all.extend(&set);
        mesh.surface_sets.insert(format!("actuator_interior_{k}"), set);
    }
    mesh.surface_sets.insert("actuator_interior".into(), all);
}

fn surface(mesh: &mut Mesh, name: &str, per_pouch: &[Vec<usize>]) {
    let elems: Vec<usize> = per_pouch.iter().flatten().copied().collect();
    let set = SurfaceSet::new(elems, false);
    let nodes = mesh.surface_nodes(&set);
    mesh.node_sets.insert(format!("{name}_nodes"), nodes);
    mesh.surface_sets.insert(name.to_string(), set);
}

fn collect(g: &Grid, pred: impl Fn(usize, usize) -> bool, nj: usize) -> Vec<usize> {
    let mut v: Vec<usize> = g
        .cols()
        .flat_map(|i| (0..nj).map(move |j| (i, j)))
        .filter(|&(i, j)| pred(i, j))
        .map(|(i, j)| g.at(i, j))
        .collect();
    v.sort_unstable();
    v.dedup();
    v
}

fn spam(mesh: &mut Mesh, ctx: &Ctx, ns: usize) {
    let breaks = ctx.breaks.clone();
    let bottom = ctx.grid(mesh, 0..=ns, 1.0, |_, _| None);
    let top = ctx.grid(mesh, 0..=ns, 2.0, |i, j| {
        (i == 0 || i == ns || breaks.contains(&j)).then(|| bottom.at(i, j))
    });
    let b = ctx.sheet(mesh, &bottom, 0..ns, -1.0, |_| MAT_TPU, TPU_THICKNESS, 0.0);
    let t = ctx.sheet(mesh, &top, 0..ns, 1.0, |_| MAT_TPU, TPU_THICKNESS, 0.0);
    let chambers = b
        .iter()
        .zip(&t)
        .map(|(b, t)| b.iter().chain(t).map(|&e| (e, false)).collect())
        .collect();
    insert_chambers(mesh, chambers, None);
    surface(mesh, "bottom", &b);
    surface(mesh, "top", &t);
    surface(mesh, "attachment", &b);
    let tape = collect(&bottom, |_, j| breaks.contains(&j), ctx.nj);
    mesh.node_sets.insert("tie_tape".into(), tape);
    let welds = collect(&bottom, |i, j| i == 0 || i == ns || breaks.contains(&j), ctx.nj);
    mesh.node_sets.insert("weld_lines".into(), welds);
}

fn epam(mesh: &mut Mesh, ctx: &Ctx, ns: usize) {
    let breaks = ctx.breaks.clone();
    let outer = ctx.grid(mesh, 0..=ns, 1.0, |_, _| None);
    let o = ctx.sheet(mesh, &outer, 0..ns, 1.0, |_| MAT_TPU, TPU_THICKNESS, 0.0);
    let chambers = o.iter().map(|l| l.iter().map(|&e| (e, false)).collect()).collect();
    let welds = collect(&outer, |i, j| i == 0 || i == ns || breaks.contains(&j), ctx.nj);
    mesh.node_sets.insert("weld_lines".into(), welds.clone());
    mesh.node_sets.insert("tie_outer".into(), welds);
    insert_chambers(mesh, chambers, Some("weld_lines"));
    surface(mesh, "outer", &o);
}

fn cpam(mesh: &mut Mesh, ctx: &Ctx, ns: usize, spec: &ScenarioSpec) -> Result<(), MeshError> {
    let ds = ctx.layout.sector_width() / ns as f64;
    let nf = (spec.f / ds).round() as usize;
    if nf == 0 || 2 * nf >= ns {
        return Err(MeshError::InvalidParameter(format!(
            "fold depth {} mm does not fit the {} mm sector at this resolution",
            spec.f,
            ctx.layout.sector_width()
        )));
    }
    let breaks = ctx.breaks.clone();
    let is_break = |j: usize| breaks.contains(&j);
    let outer = ctx.grid(mesh, 0..=ns, 3.0, |_, _| None);
    // Gusset A hangs from the outer fold, B folds back out to the beam weld.
    let a_left = ctx.grid(mesh, 0..=nf, 2.0, |i, j| (i == 0).then(|| outer.at(0, j)));
    let a_right = ctx.grid(mesh, ns - nf..=ns, 2.0, |i, j| (i == ns).then(|| outer.at(ns, j)));
    let b_left = ctx.grid(mesh, 0..=nf, 1.0, |i, j| (i == nf).then(|| a_left.at(nf, j)));
    let b_right = ctx.grid(mesh, ns - nf..=ns, 1.0, |i, j| (i == ns - nf).then(|| a_right.at(ns - nf, j)));

    let o = ctx.sheet(mesh, &outer, 0..ns, 1.0, |_| MAT_TPU, TPU_THICKNESS, 0.0);
    let al = ctx.sheet(mesh, &a_left, 0..nf, -1.0, |_| MAT_TPU, TPU_THICKNESS, 0.0);
    let ar = ctx.sheet(mesh, &a_right, ns - nf..ns, -1.0, |_| MAT_TPU, TPU_THICKNESS, 0.0);
    let bl = ctx.sheet(mesh, &b_left, 0..nf, 1.0, |_| MAT_TPU, TPU_THICKNESS, 0.0);
    let br = ctx.sheet(mesh, &b_right, ns - nf..ns, 1.0, |_| MAT_TPU, TPU_THICKNESS, 0.0);

    let chambers = (0..o.len())
        .map(|k| {
            [&o[k], &al[k], &ar[k], &bl[k], &br[k]]
                .into_iter()
                .flatten()
                .map(|&e| (e, false))
                .collect()
        })
        .collect();
    let a: Vec<Vec<usize>> = al.iter().zip(&ar).map(|(l, r)| l.iter().chain(r).copied().collect()).collect();
    let b: Vec<Vec<usize>> = bl.iter().zip(&br).map(|(l, r)| l.iter().chain(r).copied().collect()).collect();
    surface(mesh, "outer", &o);
    surface(mesh, "gusset_a", &a);
    surface(mesh, "gusset_b", &b);

    // Pouch ends weld every layer to the beam; the B edges are welded along
    // the full length.
    let tie_outer = collect(&outer, |_, j| is_break(j), ctx.nj);
    let mut tie_a = collect(&a_left, |i, j| is_break(j) && i != 0, ctx.nj);
    tie_a.extend(collect(&a_right, |i, j| is_break(j) && i != ns, ctx.nj));
    let mut tie_b = collect(&b_left, |i, j| (is_break(j) || i == 0) && i != nf, ctx.nj);
    tie_b.extend(collect(&b_right, |i, j| (is_break(j) || i == ns) && i != ns - nf, ctx.nj));
    tie_a.sort_unstable();
    tie_b.sort_unstable();

    let in_gusset = |i: usize| i <= nf || i >= ns - nf;
    let mut four = collect(&outer, |i, j| is_break(j) && in_gusset(i), ctx.nj);
    four.extend(collect(&a_left, |_, j| is_break(j), ctx.nj));
    four.extend(collect(&a_right, |_, j| is_break(j), ctx.nj));
    four.extend(collect(&b_left, |_, j| is_break(j), ctx.nj));
    four.extend(collect(&b_right, |_, j| is_break(j), ctx.nj));
    four.sort_unstable();
    four.dedup();
    mesh.node_sets.insert("weld_four_layer".into(), four);
    let mut folds_oa = collect(&outer, |i, _| i == 0 || i == ns, ctx.nj);
    folds_oa.sort_unstable();
    mesh.node_sets.insert("fold_outer_a".into(), folds_oa);
    let mut folds_ab = collect(&a_left, |i, _| i == nf, ctx.nj);
    folds_ab.extend(collect(&a_right, |i, _| i == ns - nf, ctx.nj));
    folds_ab.sort_unstable();
    mesh.node_sets.insert("fold_a_b".into(), folds_ab);

    let mut welds: Vec<usize> = tie_outer.iter().chain(&tie_a).chain(&tie_b).copied().collect();
    welds.sort_unstable();
    mesh.node_sets.insert("weld_lines".into(), welds);
    mesh.node_sets.insert("tie_outer".into(), tie_outer);
    mesh.node_sets.insert("tie_a".into(), tie_a);
    mesh.node_sets.insert("tie_b".into(), tie_b);
    insert_chambers(mesh, chambers, Some("weld_lines"));
    Ok(())
}

fn fpam(mesh: &mut Mesh, ctx: &Ctx, ns: usize, spec: &ScenarioSpec) {
    let last = ctx.nj - 1;
    let bottom = ctx.grid(mesh, 0..=ns, 1.0, |_, _| None);
    let top = ctx.grid(mesh, 0..=ns, 2.0, |i, j| {
        (i == 0 || i == ns || j == 0 || j == last).then(|| bottom.at(i, j))
    });
    // Glue strip centred under the tube, snapped to whole columns.
    let r = ctx.layout.radius;
    let half = 0.5 * spec.glue_width;
    let glued = |i: usize| (ctx.layout.phis[i] * r).abs() <= half + 1e-9;
    let glue_cell = |i: usize| glued(i) && glued(i + 1);
    let mat = |i: usize| if glue_cell(i) { MAT_GLUE } else { MAT_SILICONE };
    let b = ctx.sheet(mesh, &bottom, 0..ns, -1.0, mat, SILICONE_THICKNESS, FPAM_FIBER_ANGLE);
    let t = ctx.sheet(mesh, &top, 0..ns, 1.0, |_| MAT_SILICONE, SILICONE_THICKNESS, FPAM_FIBER_ANGLE);
    let chambers = b
        .iter()
        .zip(&t)
        .map(|(b, t)| b.iter().chain(t).map(|&e| (e, false)).collect())
        .collect();
    insert_chambers(mesh, chambers, None);
    surface(mesh, "bottom", &b);
    surface(mesh, "top", &t);
    let glue: Vec<usize> = b
        .iter()
        .flatten()
        .copied()
        .filter(|&e| mesh.elements[e].material_id == MAT_GLUE)
        .collect();
    mesh.surface_sets.insert("glue".into(), SurfaceSet::new(glue.clone(), false));
    mesh.surface_sets.insert("attachment".into(), SurfaceSet::new(glue, false));
    let glue_nodes = collect(&bottom, |i, _| glued(i), ctx.nj);
    mesh.node_sets.insert("tie_glue".into(), glue_nodes);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::validate_mesh;

    #[test]
    fn spam_chambers_are_closed() {
        let m = generate_actuator(ActuatorKind::Spam, &ScenarioSpec::default(), 2.0).unwrap();
        let r = validate_mesh(&m);
        assert!(r.passed, "{r:?}");
        assert!(m.surface_sets.contains_key("actuator_interior_4"));
    }

    #[test]
    fn fpam_fibers_at_45() {
        let spec = ScenarioSpec::for_kind(ActuatorKind::Fpam);
        let m = generate_actuator(ActuatorKind::Fpam, &spec, 2.0).unwrap();
        assert!(m.elements.iter().all(|e| e.fiber_angle == 45.0));
        assert!(validate_mesh(&m).passed);
        assert!(!m.surface_sets["glue"].is_empty());
    }

    #[test]
    fn cpam_fold_and_four_layer_welds() {
        let m = generate_actuator(ActuatorKind::Cpam, &ScenarioSpec::default(), 2.0).unwrap();
        assert!(!m.node_sets["weld_four_layer"].is_empty());
        assert!(!m.node_sets["fold_a_b"].is_empty());
        // Fold line sits about f from the outer fold.
        let a = m.position(m.node_sets["fold_outer_a"][0]);
        let b = m.node_sets["fold_a_b"]
            .iter()
            .map(|&n| m.position(n))
            .filter(|p| (p.x - a.x).abs() < 1e-9)
            .map(|p| (p - a).norm())
            .fold(f64::INFINITY, f64::min);
        assert!((b - 24.0).abs() < 2.0, "fold depth {b}");
    }

    #[test]
    fn cpam_rejects_deep_folds() {
        let mut spec = ScenarioSpec::default();
        spec.f = 30.0;
        assert!(generate_actuator(ActuatorKind::Cpam, &spec, 2.0).is_err());
    }
}
