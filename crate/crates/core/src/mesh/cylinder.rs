//! Closed cylindrical beam with flat end caps.

use std::f64::consts::{FRAC_PI_2, TAU};

use nalgebra::Vector3;

use super::layout::{CylinderLayout, FootprintRequest};
use super::zip::{zip_loops, zip_strip};
use super::{Mesh, MeshError, Ring, SurfaceSet, MAT_TPU};
use crate::scenarios::ScenarioSpec;

/// Angle of the side line carrying the markers (the +z line, facing the
/// camera).
pub const MARKER_PHI: f64 = FRAC_PI_2;

/// Uniform closed cylinder along +x with six markers evenly spaced along
/// the side line.
pub fn generate_cylinder(length: f64, diameter: f64, mesh_size: f64, thickness: f64) -> Result<Mesh, MeshError> {
    if !(thickness > 0.0) {
        return Err(MeshError::InvalidParameter("thickness must be positive".into()));
    }
    let layout = CylinderLayout::uniform(length, 0.5 * diameter, mesh_size)?;
    let markers: Vec<f64> = (1..=6).map(|k| length * k as f64 / 6.0).collect();
    Ok(build(&layout, mesh_size, thickness, &markers))
}

/// Beam of a benchmark, refined under the actuator footprint. Markers sit
/// at the pouch centres and at the tip.
pub fn generate_beam(spec: &ScenarioSpec) -> Result<(Mesh, CylinderLayout), MeshError> {
    let layout = beam_layout(spec)?;
    let mut markers = spec.pouch_centers();
    markers.push(spec.l_ibr);
    let mesh = build(&layout, spec.mesh_size_beam, 200.0, &markers);
    Ok((mesh, layout))
}

pub fn beam_layout(spec: &ScenarioSpec) -> Result<CylinderLayout, MeshError> {
    CylinderLayout::with_footprint(
        spec.l_ibr,
        spec.radius(),
        spec.mesh_size_beam,
        &FootprintRequest {
            width: spec.w,
            x_start: spec.footprint_start(),
            segment_length: spec.l_actuator,
            segments: spec.actuator_count,
            mesh_size: spec.mesh_size_actuator,
        },
    )
}

fn build(layout: &CylinderLayout, cap_size: f64, thickness: f64, marker_x: &[f64]) -> Mesh {
    let r = layout.radius;
    let ncol = layout.phis.len();
    let mut mesh = Mesh::default();
    let col_nodes: Vec<Vec<usize>> = (0..ncol)
        .map(|c| {
            layout
                .stations(c)
                .iter()
                .map(|&x| mesh.add_node(layout.point(layout.phis[c], x, r)))
                .collect()
        })
        .collect();
    let radial = |p: Vector3<f64>| Vector3::new(0.0, p.y, p.z);

    let nseg = layout.segment_breaks.len().saturating_sub(1);
    let mut footprint: Vec<Vec<usize>> = vec![Vec::new(); nseg];
    let mut sector_elems = Vec::new();
    let mut wall = Vec::new();
    for c in 0..ncol {
        let d = (c + 1) % ncol;
        let (fc, fd) = (layout.is_fine(c), layout.is_fine(d));
        if fc == fd {
            let n = col_nodes[c].len();
            for s in 0..n - 1 {
                let (p00, p01) = (col_nodes[c][s], col_nodes[c][s + 1]);
                let (p10, p11) = (col_nodes[d][s], col_nodes[d][s + 1]);
                let tris = if (c + s) % 2 == 0 {
                    [[p00, p10, p11], [p00, p11, p01]]
                } else {
                    [[p00, p10, p01], [p10, p11, p01]]
                };
                for t in tris {
                    let e = mesh.add_oriented(t, radial, MAT_TPU, thickness, 0.0);
                    wall.push(e);
                    if fc {
                        sector_elems.push(e);
                        if let Some(k) = layout.segment_breaks.windows(2).position(|w| s >= w[0] && s < w[1]) {
                            footprint[k].push(e);
                        }
                    }
                }
            }
        } else {
            let side = |col: usize| -> Vec<(f64, usize)> {
                layout
                    .stations(col)
                    .iter()
                    .copied()
                    .zip(col_nodes[col].iter().copied())
                    .collect()
            };
            for t in zip_strip(&side(c), &side(d)) {
                wall.push(mesh.add_oriented(t, radial, MAT_TPU, thickness, 0.0));
            }
        }
    }

    // End caps.
    let mut caps = Vec::new();
    for (end, dir) in [(0usize, -1.0), (1usize, 1.0)] {
        let rim: Vec<(f64, usize)> = (0..ncol)
            .map(|c| {
                let nodes = &col_nodes[c];
                (layout.phis[c], if end == 0 { nodes[0] } else { *nodes.last().unwrap() })
            })
            .collect();
        let x = if end == 0 { 0.0 } else { layout.length };
        let nr = ((r / cap_size).round() as usize).max(1);
        let mut outer = rim;
        for i in 1..nr {
            let ri = r * (1.0 - i as f64 / nr as f64);
            let n = ((TAU * ri / cap_size).ceil() as usize).max(6);
            let off = if i % 2 == 1 { 0.5 } else { 0.0 };
            let inner: Vec<(f64, usize)> = (0..n)
                .map(|j| {
                    let phi = layout.phis[0] + TAU * (j as f64 + off) / n as f64;
                    (phi, mesh.add_node(layout.point(phi, x, ri)))
                })
                .collect();
            for t in zip_loops(&outer, &inner) {
                caps.push(mesh.add_oriented(t, |_| Vector3::new(dir, 0.0, 0.0), MAT_TPU, thickness, 0.0));
            }
            outer = inner;
        }
        let centre = mesh.add_node(Vector3::new(x, 0.0, 0.0));
        for j in 0..outer.len() {
            let t = [outer[j].1, outer[(j + 1) % outer.len()].1, centre];
            caps.push(mesh.add_oriented(t, |_| Vector3::new(dir, 0.0, 0.0), MAT_TPU, thickness, 0.0));
        }
    }

    let mut all = wall.clone();
    all.extend_from_slice(&caps);
    mesh.surface_sets.insert("beam_interior".into(), SurfaceSet::new(all, true));
    mesh.surface_sets.insert("beam_wall".into(), SurfaceSet::new(wall, false));
    mesh.node_sets
        .insert("end_pinned".into(), (0..ncol).map(|c| col_nodes[c][0]).collect());

    // Rings at every coarse station, from the polygon columns.
    mesh.rings = (0..layout.x_coarse.len())
        .map(|s| Ring {
            x: layout.x_coarse[s],
            nodes: layout
                .polygon
                .iter()
                .map(|&c| {
                    if layout.is_fine(c) {
                        col_nodes[c][layout.coarse_in_fine[s]]
                    } else {
                        col_nodes[c][s]
                    }
                })
                .collect(),
        })
        .collect();

    let wall_nodes: Vec<usize> = col_nodes.iter().flatten().copied().collect();
    let markers: Vec<usize> = marker_x
        .iter()
        .map(|&x| {
            let target = layout.point(MARKER_PHI, x, r);
            *wall_nodes
                .iter()
                .min_by(|&&a, &&b| {
                    (mesh.position(a) - target)
                        .norm()
                        .total_cmp(&(mesh.position(b) - target).norm())
                })
                .unwrap()
        })
        .collect();
    mesh.node_sets.insert("centerline_markers".into(), markers);

    if let Some((a, b)) = layout.sector {
        let (f0, f1) = layout.footprint_range().unwrap();
        let mut nodes = Vec::new();
        for col in &col_nodes[a..=b] {
            nodes.extend_from_slice(&col[f0..=f1]);
        }
        nodes.sort_unstable();
        mesh.node_sets.insert("footprint_nodes".into(), nodes);
        let mut sector_nodes: Vec<usize> = col_nodes[a..=b].iter().flatten().copied().collect();
        sector_nodes.sort_unstable();
        mesh.node_sets.insert("sector_nodes".into(), sector_nodes);
        mesh.surface_sets
            .insert("sector".into(), SurfaceSet::new(sector_elems, false));
        let mut fp_all = Vec::new();
        for (k, elems) in footprint.into_iter().enumerate() {
            fp_all.extend_from_slice(&elems);
            mesh.surface_sets
                .insert(format!("footprint_{k}"), SurfaceSet::new(elems, false));
        }
        mesh.surface_sets.insert("footprint".into(), SurfaceSet::new(fp_all, false));
    }
    mesh
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::validate_mesh;
    use std::f64::consts::PI;

    #[test]
    fn uniform_cylinder_is_closed() {
        let m = generate_cylinder(360.0, 80.0, 8.0, 200.0).unwrap();
        let r = validate_mesh(&m);
        assert!(r.passed, "{r:?}");
        assert!(m.rings[0].nodes.len() >= 32);
    }

    #[test]
    fn degenerate_refinement_rejected() {
        assert!(generate_cylinder(360.0, 80.0, 360.0, 200.0).is_err());
    }

    #[test]
    fn area_matches_analytic() {
        let m = generate_cylinder(100.0, 20.0, 2.0, 200.0).unwrap();
        let exact = PI * 20.0 * 100.0 + 2.0 * PI * 100.0;
        assert!((m.total_area() - exact).abs() / exact < 0.02);
    }

    #[test]
    fn benchmark_beam_is_closed_and_refined() {
        let spec = ScenarioSpec::default();
        let (m, layout) = generate_beam(&spec).unwrap();
        let r = validate_mesh(&m);
        assert!(r.passed, "{r:?}");
        assert!(layout.sector.is_some());
        assert_eq!(m.node_sets["centerline_markers"].len(), 6);
        let fp: f64 = m.surface_sets["footprint"].elements.iter().map(|&e| m.element_area(e)).sum();
        let expect = layout.sector_width() * 300.0;
        assert!((fp - expect).abs() / expect < 0.01, "{fp} vs {expect}");
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate_beam(&ScenarioSpec::default()).unwrap().0;
        let b = generate_beam(&ScenarioSpec::default()).unwrap().0;
        assert_eq!(a, b);
    }
}
