use ibr_core::materials::library::tpu_nylon;
use ibr_core::mesh::{Assembly, Mesh, PartRange, SurfaceSet, TieConstraint, MAT_TPU};
use ibr_core::solver::{AmplitudeSegment, LoadSchedule, Model, PressureChannel, Solver, SolverConfig};
use nalgebra::Vector3;

const FIXED: &str = "fixed";

fn assembly(mesh: Mesh, ties: Vec<TieConstraint>) -> Assembly {
    let range = PartRange {
        name: "part".into(),
        node_offset: 0,
        node_count: mesh.nodes.len(),
        element_offset: 0,
        element_count: mesh.elements.len(),
    };
    Assembly {
        parts: vec![("part".into(), mesh.clone())],
        ranges: vec![range],
        mesh,
        ties,
        contact_pairs: Vec::new(),
        layer_gap: 0.0,
        kind: None,
    }
}

fn triangle() -> Mesh {
    let mut m = Mesh::default();
    m.add_node(Vector3::new(0.0, 0.0, 0.0));
    m.add_node(Vector3::new(10.0, 0.0, 0.0));
    m.add_node(Vector3::new(0.0, 10.0, 0.0));
    m.add_element([0, 1, 2], MAT_TPU, 200.0, 0.0);
    m.node_sets.insert(FIXED.into(), Vec::new());
    m.surface_sets.insert("skin".into(), SurfaceSet::new(vec![0], true));
    m
}

fn config(alpha: f64) -> SolverConfig {
    SolverConfig {
        damping_alpha: alpha,
        bending_scale: 0.0,
        threads: 1,
        ..SolverConfig::default()
    }
}

/// Full pressure from the first step on.
fn constant(set: &str, kpa: f64) -> LoadSchedule {
    LoadSchedule {
        channels: vec![PressureChannel {
            surface_set: set.into(),
            peak_pressure: kpa,
            amplitude: AmplitudeSegment {
                t_start: -2.0,
                t_end: -1.0,
            },
        }],
    }
}

fn solver(asm: &Assembly, schedule: LoadSchedule, cfg: SolverConfig) -> Solver {
    let model = Model::build(asm, &[tpu_nylon()], &schedule, FIXED, &cfg).unwrap();
    Solver::new(model, schedule, cfg).unwrap()
}

#[test]
fn rigid_drift_is_ballistic() {
    let asm = assembly(triangle(), Vec::new());
    let mut s = solver(&asm, LoadSchedule::default(), config(0.0));
    let v = Vector3::new(3.0, -2.0, 1.5);
    for w in s.state.velocities.iter_mut() {
        *w = v;
    }
    let n = 200;
    for _ in 0..n {
        s.step().unwrap();
    }
    let t = n as f64 * s.time_step();
    for u in &s.state.displacements {
        assert!((u - v * t).norm() < 1e-9 * t * v.norm());
    }
    let e = s.energy();
    assert!(e.internal_strain.abs() < 1e-12);
    let ke0 = 0.5 * s.state.lumped_mass.iter().sum::<f64>() * v.norm_squared();
    assert!((e.kinetic - ke0).abs() < 1e-10 * ke0);
}

#[test]
fn damping_decays_by_the_discrete_factor() {
    let alpha = 50.0;
    let asm = assembly(triangle(), Vec::new());
    let mut s = solver(&asm, LoadSchedule::default(), config(alpha));
    let v = Vector3::new(0.0, 0.0, 4.0);
    for w in s.state.velocities.iter_mut() {
        *w = v;
    }
    let n = 100;
    for _ in 0..n {
        s.step().unwrap();
    }
    let h = 0.5 * alpha * s.time_step();
    let expect = 4.0 * ((1.0 - h) / (1.0 + h)).powi(n);
    for w in &s.state.velocities {
        assert!((w.z - expect).abs() < 1e-12);
    }
    let e = s.energy();
    let ke0 = 0.5 * s.state.lumped_mass.iter().sum::<f64>() * 16.0;
    assert!((ke0 - e.kinetic - e.damping_dissipation).abs() < 1e-9 * ke0);
}

#[test]
fn unloaded_structure_stays_put() {
    let asm = assembly(triangle(), Vec::new());
    let mut s = solver(&asm, LoadSchedule::default(), config(20.0));
    for _ in 0..50 {
        s.step().unwrap();
    }
    assert!(s.state.displacements.iter().all(|u| *u == Vector3::zeros()));
    assert_eq!(s.energy().kinetic, 0.0);
}

#[test]
fn single_facet_pressure_acceleration() {
    let asm = assembly(triangle(), Vec::new());
    let kpa = 10.0;
    let mut s = solver(&asm, constant("skin", kpa), config(0.0));
    s.step().unwrap();
    // Force p·A/3 along +z on each node; area 50 mm².
    let f = kpa * 1e-3 * 50.0 / 3.0;
    for (i, a) in s.state.accelerations.iter().enumerate() {
        let expect = f / s.state.lumped_mass[i];
        assert!((a.z - expect).abs() < 1e-9 * expect, "{} vs {expect}", a.z);
        assert!(a.x.abs() < 1e-9 * expect && a.y.abs() < 1e-9 * expect);
    }
    let dt = s.time_step();
    let e = s.energy();
    // Work over the first step: ½·(F·du) counted at both ends.
    let work: f64 = (0..3).map(|i| f * f / s.state.lumped_mass[i] * dt * dt).sum();
    assert!((e.external_work - work).abs() < 1e-9 * work);
}

#[test]
fn ties_carry_load_to_followers() {
    // Two triangles sharing the edge 1–2 through duplicated, tied nodes.
    let mut m = triangle();
    let a = m.add_node(Vector3::new(10.0, 0.0, 0.0));
    let b = m.add_node(Vector3::new(0.0, 10.0, 0.0));
    let c = m.add_node(Vector3::new(10.0, 10.0, 0.0));
    m.add_element([a, c, b], MAT_TPU, 200.0, 0.0);
    m.node_sets.insert("lead".into(), vec![1, 2]);
    m.node_sets.insert("follow".into(), vec![a, b]);
    m.node_sets.insert(FIXED.into(), vec![0]);
    let tie = TieConstraint {
        leader_set: "lead".into(),
        follower_set: "follow".into(),
        position_tolerance: 1e-6,
        pairs: vec![(a, 1), (b, 2)],
    };
    let asm = assembly(m, vec![tie]);
    let mut s = solver(&asm, constant("skin", 5.0), config(20.0));
    for _ in 0..300 {
        s.step().unwrap();
    }
    let u = &s.state.displacements;
    assert_eq!(u[0], Vector3::zeros());
    assert_eq!(u[a], u[1]);
    assert_eq!(u[b], u[2]);
    // The unloaded second triangle is dragged along through the tie.
    assert!(u[c].norm() > 1e-3, "{:?}", u[c]);
}
