//! Precomputed simulation model: tie-reduced elements, lumped masses,
//! load channels, hinges and contact surfaces.

use nalgebra::{Matrix2, Vector3};

use super::contact::{ContactModel, ContactSurface};
use super::element::ElementRef;
use super::hinge::{dihedral, interior_edges, Hinge};
use super::{LoadSchedule, SolverConfig, SolverError};
use crate::materials::{Material, MaterialModel};
use crate::mesh::{Assembly, Mesh, MeshError};

/// Largest ω·Δt granted to hinge and contact springs. The membrane uses up
/// to 2·safety of the stability limit ω·Δt < 2.
const SPRING_BUDGET: f64 = 0.8;

/// Pressure channel resolved to oriented root triangles.
#[derive(Debug, Clone)]
pub struct ChannelRef {
    pub name: String,
    pub tris: Vec<[usize; 3]>,
}

impl ChannelRef {
    /// Follower load of pressure `p` (MPa) on the current positions: each
    /// triangle contributes `p·A·n/3` to each of its nodes.
    pub fn add_forces(&self, x: &[Vector3<f64>], p: f64, out: &mut [Vector3<f64>]) {
        for tri in &self.tris {
            let f = (x[tri[1]] - x[tri[0]]).cross(&(x[tri[2]] - x[tri[0]])) * (p / 6.0);
            for &i in tri {
                out[i] += f;
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct Model {
    pub reference: Vec<Vector3<f64>>,
    /// Tie root of every node.
    pub root: Vec<usize>,
    /// Independent nodes that are not pinned.
    pub free: Vec<usize>,
    pub pinned: Vec<bool>,
    pub elements: Vec<ElementRef>,
    pub materials: Vec<MaterialModel>,
    pub hinges: Vec<Hinge>,
    pub channels: Vec<ChannelRef>,
    pub contact: ContactModel,
    /// tonne, accumulated on tie roots.
    pub mass: Vec<f64>,
    /// Per element: unscaled mass (tonne), critical time step at the
    /// initial modulus (s), current mass scale and tangent at rest (MPa).
    pub element_mass: Vec<f64>,
    pub element_dt: Vec<f64>,
    pub element_scale: Vec<f64>,
    pub rest_tangent: Vec<f64>,
    /// Unscaled physical mass (tonne).
    pub physical_mass: f64,
    /// s
    pub dt: f64,
}

/// Lumped nodal masses: each element gives a third of
/// `area · areal_density · mass_scaling` to each of its nodes. Areal
/// densities are per material slot (tonne/mm²).
pub fn assemble_lumped_mass(mesh: &Mesh, areal_density: &[f64], mass_scaling: f64) -> Result<Vec<f64>, SolverError> {
    let mut m = vec![0.0; mesh.nodes.len()];
    for (e, el) in mesh.elements.iter().enumerate() {
        let area = mesh.element_area(e);
        if !(area > 0.0) {
            return Err(MeshError::Geometry(format!("element {e} has zero area")).into());
        }
        let rho = *areal_density.get(el.material_id).ok_or_else(|| {
            SolverError::InvalidConfig(format!("no density for material slot {}", el.material_id))
        })?;
        if !(rho > 0.0) {
            return Err(SolverError::InvalidConfig("areal densities must be positive".into()));
        }
        for &n in &el.node_ids {
            m[n] += area * rho * mass_scaling / 3.0;
        }
    }
    Ok(m)
}

/// Smallest altitude of a triangle (mm).
pub fn characteristic_length(x: &[Vector3<f64>; 3]) -> f64 {
    let area2 = (x[1] - x[0]).cross(&(x[2] - x[0])).norm();
    let longest = (0..3).map(|k| (x[(k + 1) % 3] - x[k]).norm()).fold(0.0, f64::max);
    area2 / longest
}

/// Critical step of one element: `L / √(E/ρ)`.
pub fn element_time_step(length: f64, modulus: f64, density: f64) -> f64 {
    length / (modulus / density).sqrt()
}

/// `safety · min_e L_e/c_e` over the mesh with uniform mass scaling.
pub fn stable_time_step(mesh: &Mesh, materials: &[Material], config: &SolverConfig) -> Result<f64, SolverError> {
    let mut dt = f64::INFINITY;
    for el in &mesh.elements {
        let mat = material(materials, el.material_id)?;
        let x = el.node_ids.map(|n| mesh.position(n));
        let t = element_thickness(el.thickness, mat);
        let rho = mat.areal_density() * config.mass_scaling / t;
        dt = dt.min(element_time_step(characteristic_length(&x), mat.model.initial_modulus(), rho));
    }
    Ok(config.time_step_safety * dt)
}

fn material(materials: &[Material], slot: usize) -> Result<&Material, SolverError> {
    materials
        .get(slot)
        .ok_or_else(|| SolverError::InvalidConfig(format!("no material bound to slot {slot}")))
}

fn element_thickness(thickness_um: f64, mat: &Material) -> f64 {
    thickness_um * 1.0e-3 + mat.model.added_thickness()
}

impl Model {
    pub fn build(
        assembly: &Assembly,
        materials: &[Material],
        schedule: &LoadSchedule,
        pinned_set: &str,
        config: &SolverConfig,
    ) -> Result<Self, SolverError> {
        config.validate()?;
        schedule.validate()?;
        for m in materials {
            m.validate()?;
        }
        let mesh = &assembly.mesh;
        let n = mesh.nodes.len();
        let root = assembly.node_map();
        let reference: Vec<Vector3<f64>> = mesh.nodes.iter().map(|n| n.position).collect();

        // Elements and per-element mass scaling.
        let mut elements = Vec::with_capacity(mesh.elements.len());
        let mut mass = vec![0.0; n];
        let mut physical_mass = 0.0;
        let mut dt = f64::INFINITY;
        let mut element_mass = Vec::with_capacity(mesh.elements.len());
        let mut element_dt = Vec::with_capacity(mesh.elements.len());
        let mut element_scale = Vec::with_capacity(mesh.elements.len());
        let mut rest_tangent = Vec::with_capacity(mesh.elements.len());
        for (e, el) in mesh.elements.iter().enumerate() {
            let mat = material(materials, el.material_id)?;
            let nodes = el.node_ids.map(|i| root[i]);
            let x = nodes.map(|i| reference[i]);
            let t = element_thickness(el.thickness, mat);
            let r = ElementRef::new(nodes, &x, t, el.material_id, el.fiber_angle)
                .ok_or_else(|| MeshError::Geometry(format!("element {e} is degenerate after tie reduction")))?;
            let rho_a = mat.areal_density();
            let dt_e = element_time_step(characteristic_length(&x), mat.model.initial_modulus(), rho_a / t)
                * config.time_step_safety;
            let mut s = config.mass_scaling;
            if let Some(target) = config.target_time_step {
                s = s.max((target / dt_e).powi(2));
            }
            dt = dt.min(dt_e * s.sqrt());
            physical_mass += rho_a * r.area;
            for &i in &nodes {
                mass[i] += rho_a * s * r.area / 3.0;
            }
            element_mass.push(rho_a * r.area);
            element_dt.push(dt_e);
            element_scale.push(s);
            rest_tangent.push(mat.model.principal_tangent(&Matrix2::identity(), &r.fill_dir)?);
            elements.push(r);
        }
        if elements.is_empty() {
            return Err(MeshError::Geometry("assembly has no elements".into()).into());
        }

        let mut pinned = vec![false; n];
        for &i in mesh.node_set(pinned_set)? {
            pinned[root[i]] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&i| root[i] == i && !pinned[i] && mass[i] > 0.0).collect();

        let mut channels = Vec::new();
        for c in &schedule.channels {
            let set = mesh.surface_set(&c.surface_set)?;
            let tris = set
                .iter()
                .map(|(e, rev)| {
                    let [a, b, c] = mesh.elements[e].node_ids.map(|i| root[i]);
                    if rev {
                        [a, c, b]
                    } else {
                        [a, b, c]
                    }
                })
                .collect();
            channels.push(ChannelRef {
                name: c.surface_set.clone(),
                tris,
            });
        }

        // Bending hinges within each part.
        let mut hinges = Vec::new();
        let mut hinge_k = vec![0.0; n];
        if config.bending_scale > 0.0 {
            for r in &assembly.ranges {
                let range = r.element_offset..r.element_offset + r.element_count;
                let tris: Vec<[usize; 3]> = mesh.elements[range.clone()].iter().map(|e| e.node_ids).collect();
                for [a, b, c, d, ta, tb] in interior_edges(&tris) {
                    let nodes = [a, b, c, d].map(|i| root[i]);
                    let mut u = nodes;
                    u.sort_unstable();
                    if u.windows(2).any(|w| w[0] == w[1]) {
                        continue;
                    }
                    let x = nodes.map(|i| reference[i]);
                    let Some((theta, g)) = dihedral(&x) else { continue };
                    let (ea, eb) = (&elements[r.element_offset + ta], &elements[r.element_offset + tb]);
                    let t = 0.5 * (ea.thickness + eb.thickness);
                    let modulus = 0.5
                        * (materials[ea.material].model.initial_modulus()
                            + materials[eb.material].model.initial_modulus());
                    let plate = config.bending_scale * modulus * t.powi(3) / 12.0;
                    let stiffness = 0.75 * plate * (x[1] - x[0]).norm_squared() / (ea.area + eb.area);
                    let gsum: f64 = g.iter().map(|v| v.norm()).sum();
                    for k in 0..4 {
                        hinge_k[nodes[k]] += stiffness * g[k].norm() * gsum;
                    }
                    hinges.push(Hinge {
                        nodes,
                        stiffness,
                        rest_angle: theta,
                    });
                }
            }
        }

        let contact = contact_model(assembly, &root, &reference, config)?;
        let mut contact_k = vec![0.0; n];
        for s in &contact.surfaces {
            for (&i, &a) in s.slaves.iter().zip(&s.slave_area) {
                contact_k[i] += contact.penalty * a;
            }
            for t in &s.tris {
                let a = 0.5 * (reference[t[1]] - reference[t[0]]).cross(&(reference[t[2]] - reference[t[0]])).norm();
                for &i in t {
                    contact_k[i] += contact.penalty * a / 3.0;
                }
            }
        }

        // Extra mass so that hinge and contact springs stay within
        // ω·Δt ≤ SPRING_BUDGET on top of the membrane response.
        let f = (dt / SPRING_BUDGET).powi(2);
        for i in 0..n {
            if root[i] == i {
                let need = (hinge_k[i] + contact_k[i]) * f;
                if mass[i] > 0.0 && mass[i] < need {
                    mass[i] = need;
                }
            }
        }

        Ok(Self {
            reference,
            root,
            free,
            pinned,
            elements,
            materials: materials.iter().map(|m| m.model.clone()).collect(),
            hinges,
            channels,
            contact,
            mass,
            element_mass,
            element_dt,
            element_scale,
            rest_tangent,
            physical_mass,
            dt,
        })
    }

    pub fn node_count(&self) -> usize {
        self.reference.len()
    }

    /// Total lumped mass (tonne).
    pub fn total_mass(&self) -> f64 {
        self.mass.iter().sum()
    }
}

fn contact_model(
    assembly: &Assembly,
    root: &[usize],
    reference: &[Vector3<f64>],
    config: &SolverConfig,
) -> Result<ContactModel, SolverError> {
    let mesh = &assembly.mesh;
    let mut surfaces = Vec::new();
    let mut size: f64 = 0.0;
    for p in &assembly.contact_pairs {
        let master = mesh.surface_set(&p.master_surface)?;
        let tris: Vec<[usize; 3]> = master
            .elements
            .iter()
            .map(|&e| mesh.elements[e].node_ids.map(|i| root[i]))
            .collect();
        for t in &tris {
            size = size.max((reference[t[1]] - reference[t[0]]).norm());
        }
        // Tributary area from the surface the slave nodes belong to.
        let own = p.slave_set.strip_suffix("_nodes").and_then(|s| mesh.surface_sets.get(s));
        let own_elems: Vec<usize> = match own {
            Some(s) => s.elements.clone(),
            None => (0..mesh.elements.len()).collect(),
        };
        let mut area = vec![0.0; mesh.nodes.len()];
        for &e in &own_elems {
            let a = mesh.element_area(e) / 3.0;
            for &i in &mesh.elements[e].node_ids {
                area[root[i]] += a;
            }
        }
        let mut slaves: Vec<usize> = mesh.node_set(&p.slave_set)?.iter().map(|&i| root[i]).collect();
        slaves.sort_unstable();
        slaves.dedup();
        slaves.retain(|&i| area[i] > 0.0);
        let slave_area = slaves.iter().map(|&i| area[i]).collect();
        surfaces.push(ContactSurface {
            name: format!("{} -> {}", p.slave_set, p.master_surface),
            slaves,
            slave_area,
            tris,
            exclusion_radius: p.exclusion_radius,
        });
    }
    let margin = (0.5 * size).clamp(0.2, 2.0);
    Ok(ContactModel {
        surfaces,
        penalty: config.contact_penalty_stiffness,
        damping_ratio: config.contact_damping_ratio,
        margin,
        max_depth: margin,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::library::tpu_nylon;
    use crate::mesh::{generate_cylinder, MAT_TPU};

    fn one_triangle(area_scale: f64) -> Mesh {
        let mut m = Mesh::default();
        let s = area_scale.sqrt();
        m.add_node(Vector3::zeros());
        m.add_node(Vector3::new(s * 2.0_f64.sqrt(), 0.0, 0.0));
        m.add_node(Vector3::new(0.0, s * 2.0_f64.sqrt(), 0.0));
        m.add_element([0, 1, 2], MAT_TPU, 200.0, 0.0);
        m
    }

    #[test]
    fn single_triangle_mass_split() {
        let m = one_triangle(1.0);
        let rho = 1.0e-10;
        let mass = assemble_lumped_mass(&m, &[rho], 1.0).unwrap();
        for v in mass {
            assert!((v - rho / 3.0).abs() < 1e-24);
        }
    }

    #[test]
    fn beam_mass_is_conserved() {
        let m = generate_cylinder(360.0, 80.0, 8.0, 200.0).unwrap();
        let rho = tpu_nylon().areal_density();
        let mass = assemble_lumped_mass(&m, &[rho], 1.0).unwrap();
        let total: f64 = mass.iter().sum();
        let expect = m.total_area() * rho;
        assert!((total - expect).abs() <= 1e-12 * expect);
        let scaled: f64 = assemble_lumped_mass(&m, &[rho], 100.0).unwrap().iter().sum();
        assert!((scaled / total - 100.0).abs() < 1e-9);
    }

    #[test]
    fn zero_area_element_rejected() {
        let mut m = one_triangle(1.0);
        m.nodes[2].position = Vector3::new(0.5, 0.0, 0.0);
        assert!(assemble_lumped_mass(&m, &[1e-10], 1.0).is_err());
    }

    #[test]
    fn wave_speed_oracle() {
        // L = 1 mm, E = 215 MPa, ρ = 1e-9 tonne/mm³.
        let c = (215.0f64 / 1.0e-9).sqrt();
        assert!((element_time_step(1.0, 215.0, 1.0e-9) - 1.0 / c).abs() < 1e-18);
    }

    #[test]
    fn time_step_scales() {
        let tpu = tpu_nylon();
        let base = SolverConfig {
            target_time_step: None,
            ..SolverConfig::default()
        };
        let m1 = one_triangle(1.0);
        let dt1 = stable_time_step(&m1, std::slice::from_ref(&tpu), &base).unwrap();
        let m2 = one_triangle(0.25);
        let dt2 = stable_time_step(&m2, std::slice::from_ref(&tpu), &base).unwrap();
        assert!((dt1 / dt2 - 2.0).abs() < 1e-12);
        let cfg4 = SolverConfig {
            mass_scaling: 4.0,
            ..base.clone()
        };
        let dt4 = stable_time_step(&m1, std::slice::from_ref(&tpu), &cfg4).unwrap();
        assert!((dt4 / dt1 - 2.0).abs() < 1e-12);
        let cfg100 = SolverConfig {
            mass_scaling: 100.0,
            ..base
        };
        let dt100 = stable_time_step(&m1, std::slice::from_ref(&tpu), &cfg100).unwrap();
        assert!((dt100 / dt1 - 10.0).abs() < 1e-12);
        // Explicit oracle for the unit right triangle.
        let l = characteristic_length(&[m1.position(0), m1.position(1), m1.position(2)]);
        let rho = tpu.areal_density() / tpu.thickness();
        let expect = 0.8 * l / (tpu.model.initial_modulus() / rho).sqrt();
        assert!((dt1 - expect).abs() < 1e-15);
    }
}
