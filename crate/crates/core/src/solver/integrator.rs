//! Leapfrog central-difference time stepping.

use nalgebra::{Matrix2, Vector3};
use rayon::prelude::*;

use super::contact::ContactState;
use super::element::{self, ElementEval};
use super::model::Model;
use super::trajectory::{Frame, Trajectory};
use super::{EnergyLedger, LoadSchedule, SimState, SolverConfig, SolverError};
use crate::materials::MaterialModel;
use crate::scenarios::ScenarioJob;

/// Largest displacement magnitude treated as finite (mm).
const DIVERGENCE_LIMIT: f64 = 1.0e5;
/// Steps between checks of the current element stiffness against the time
/// step.
const MASS_CHECK_INTERVAL: usize = 10;
/// Stiffening tolerated before an element gets more mass; covered by the
/// time step safety factor.
const MASS_TOLERANCE: f64 = 1.2;

pub struct Solver {
    pub model: Model,
    pub schedule: LoadSchedule,
    pub config: SolverConfig,
    pub state: SimState,
    contact: ContactState,
    positions: Vec<Vector3<f64>>,
    last_stress: Vec<Matrix2<f64>>,
    evals: Vec<(ElementEval, bool)>,
    /// Net force excluding damping at the current state.
    force: Vec<Vector3<f64>>,
    external: Vec<Vector3<f64>>,
    contact_force: Vec<Vector3<f64>>,
    pool: Option<rayon::ThreadPool>,
    pub degenerate_evaluations: usize,
    /// Mass added during the run to keep stiffened elements stable (tonne).
    pub added_mass: f64,
}

fn eval_one(
    el: &element::ElementRef,
    materials: &[MaterialModel],
    x: &[Vector3<f64>],
    last: &mut Matrix2<f64>,
) -> (ElementEval, bool) {
    let xe = el.nodes.map(|i| x[i]);
    match element::evaluate(el, &materials[el.material], &xe) {
        Ok(e) if e.forces.iter().all(|f| f.iter().all(|v| v.is_finite())) => {
            *last = e.stress_pk2;
            (e, false)
        }
        _ => {
            let f = el.deformation_gradient(&xe);
            (element::with_stress(el, &f, *last, 0.0, true), true)
        }
    }
}

impl Solver {
    pub fn new(model: Model, schedule: LoadSchedule, config: SolverConfig) -> Result<Self, SolverError> {
        config.validate()?;
        let n = model.node_count();
        let pool = match config.threads {
            0 | 1 => None,
            t => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| SolverError::InvalidConfig(e.to_string()))?,
            ),
        };
        let state = SimState::at_rest(model.mass.clone());
        let mut s = Self {
            contact: model.contact.init_state(),
            positions: model.reference.clone(),
            last_stress: vec![Matrix2::zeros(); model.elements.len()],
            evals: vec![
                (
                    ElementEval {
                        forces: [Vector3::zeros(); 3],
                        energy: 0.0,
                        stress_pk2: Matrix2::zeros(),
                        valid: true,
                    },
                    false
                );
                model.elements.len()
            ],
            force: vec![Vector3::zeros(); n],
            external: vec![Vector3::zeros(); n],
            contact_force: vec![Vector3::zeros(); n],
            model,
            schedule,
            config,
            state,
            pool,
            degenerate_evaluations: 0,
            added_mass: 0.0,
        };
        s.update_forces();
        Ok(s)
    }

    pub fn time_step(&self) -> f64 {
        self.model.dt
    }

    fn evaluate_elements(&mut self) {
        let m = &self.model;
        let x = &self.positions;
        let work = |((el, last), out): ((&element::ElementRef, &mut Matrix2<f64>), &mut (ElementEval, bool))| {
            *out = eval_one(el, &m.materials, x, last);
        };
        match (&self.pool, self.config.threads) {
            (_, 1) => m
                .elements
                .iter()
                .zip(self.last_stress.iter_mut())
                .zip(self.evals.iter_mut())
                .for_each(work),
            (Some(pool), _) => pool.install(|| {
                m.elements
                    .par_iter()
                    .zip(self.last_stress.par_iter_mut())
                    .zip(self.evals.par_iter_mut())
                    .for_each(work)
            }),
            (None, _) => m
                .elements
                .par_iter()
                .zip(self.last_stress.par_iter_mut())
                .zip(self.evals.par_iter_mut())
                .for_each(work),
        }
        self.degenerate_evaluations += self.evals.iter().filter(|e| e.1).count();
    }

    /// Recomputes all forces and the stored energies at the current state.
    fn update_forces(&mut self) {
        let t = self.state.time;
        self.evaluate_elements();
        let m = &self.model;
        let x = &self.positions;
        for f in self.force.iter_mut() {
            *f = Vector3::zeros();
        }
        let mut strain = 0.0;
        let mut invalid = 0;
        for (el, (ev, _)) in m.elements.iter().zip(&self.evals) {
            for k in 0..3 {
                self.force[el.nodes[k]] += ev.forces[k];
            }
            strain += ev.energy;
            invalid += (!ev.valid) as usize;
        }
        for h in &m.hinges {
            if let Some((f, e)) = h.evaluate(&h.nodes.map(|i| x[i])) {
                for k in 0..4 {
                    self.force[h.nodes[k]] += f[k];
                }
                strain += e;
            }
        }

        for f in self.external.iter_mut() {
            *f = Vector3::zeros();
        }
        for (ch, spec) in m.channels.iter().zip(&self.schedule.channels) {
            let p = spec.pressure(t);
            if p == 0.0 {
                continue;
            }
            ch.add_forces(x, p, &mut self.external);
        }

        for f in self.contact_force.iter_mut() {
            *f = Vector3::zeros();
        }
        if !m.contact.is_empty() {
            m.contact.update(&mut self.contact, x, &m.reference);
            m.contact.add_forces(
                &mut self.contact,
                x,
                Some((&self.state.velocities, &self.state.lumped_mass)),
                &mut self.contact_force,
            );
        }

        for ((f, e), c) in self.force.iter_mut().zip(&self.external).zip(&self.contact_force) {
            *f += e + c;
        }
        self.state.energy.internal_strain = strain;
        self.state.energy.fabric_validity_violations = invalid;
    }

    /// Raises the mass scale of elements whose current tangent stiffness
    /// would make the time step unstable. Momentum is conserved; the kinetic
    /// energy this removes is booked as dissipation.
    fn rescale_masses(&mut self) {
        let m = &self.model;
        let x = &self.positions;
        let dt = m.dt;
        let need = |(e, el): (usize, &element::ElementRef)| -> f64 {
            let xe = el.nodes.map(|i| x[i]);
            let f = el.deformation_gradient(&xe);
            let c = f.transpose() * f;
            let Ok(t) = m.materials[el.material].principal_tangent(&c, &el.fill_dir) else { return 0.0 };
            (dt / m.element_dt[e]).powi(2) * t / m.rest_tangent[e]
        };
        let required: Vec<f64> = match (&self.pool, self.config.threads) {
            (_, 1) => m.elements.iter().enumerate().map(need).collect(),
            (Some(pool), _) => pool.install(|| m.elements.par_iter().enumerate().map(need).collect()),
            (None, _) => m.elements.par_iter().enumerate().map(need).collect(),
        };
        let st = &mut self.state;
        for (e, &req) in required.iter().enumerate() {
            let scale = self.model.element_scale[e];
            if !(req > scale * MASS_TOLERANCE) {
                continue;
            }
            let next = req;
            let dm = self.model.element_mass[e] * (next - scale) / 3.0;
            self.model.element_scale[e] = next;
            for &i in &self.model.elements[e].nodes {
                let m0 = st.lumped_mass[i];
                let v0 = st.velocities[i];
                st.lumped_mass[i] = m0 + dm;
                st.velocities[i] = v0 * (m0 / (m0 + dm));
                st.energy.damping_dissipation += 0.5 * m0 * v0.norm_squared() * dm / (m0 + dm);
                self.added_mass += dm;
            }
        }
    }

    /// Advances one time step.
    pub fn step(&mut self) -> Result<(), SolverError> {
        if self.state.step % MASS_CHECK_INTERVAL == 0 && self.state.step > 0 {
            self.rescale_masses();
        }
        let dt = self.model.dt;
        let alpha = self.config.damping_alpha;
        let (c1, c2) = (1.0 - 0.5 * alpha * dt, 1.0 / (1.0 + 0.5 * alpha * dt));
        let st = &mut self.state;
        let mut dissipation = 0.0;
        let mut work = 0.0;
        let mut contact_work = 0.0;
        for &i in &self.model.free {
            let m = st.lumped_mass[i];
            let vo = st.velocities[i];
            let vn = (vo * c1 + self.force[i] * (dt / m)) * c2;
            let vm = (vo + vn) * 0.5;
            dissipation += alpha * m * vm.norm_squared() * dt;
            let du = vn * dt;
            work += 0.5 * self.external[i].dot(&du);
            contact_work += 0.5 * self.contact_force[i].dot(&du);
            st.accelerations[i] = (vn - vo) / dt;
            st.velocities[i] = vn;
            st.displacements[i] += du;
        }
        let root = &self.model.root;
        for i in 0..root.len() {
            let r = root[i];
            if r != i {
                st.displacements[i] = st.displacements[r];
                st.velocities[i] = st.velocities[r];
                st.accelerations[i] = st.accelerations[r];
            }
            self.positions[i] = self.model.reference[i] + st.displacements[r];
        }
        st.step += 1;
        st.time = st.step as f64 * dt;

        self.update_forces();

        let st = &mut self.state;
        let mut kinetic = 0.0;
        let mut umax: f64 = 0.0;
        for &i in &self.model.free {
            let du = st.velocities[i] * dt;
            work += 0.5 * self.external[i].dot(&du);
            contact_work += 0.5 * self.contact_force[i].dot(&du);
            kinetic += 0.5 * st.lumped_mass[i] * st.velocities[i].norm_squared();
            umax = umax.max(st.displacements[i].amax());
        }
        let e = &mut st.energy;
        e.kinetic = kinetic;
        e.external_work += work;
        e.contact_penalty -= contact_work;
        e.damping_dissipation += dissipation;
        if !(umax < DIVERGENCE_LIMIT) || !kinetic.is_finite() || !e.internal_strain.is_finite() {
            return Err(SolverError::Divergence {
                time: st.time,
                step: st.step,
                message: format!("displacement {umax:e} mm, kinetic energy {kinetic:e} mJ"),
                partial: Box::new(Trajectory {
                    reference: self.model.reference.clone(),
                    frames: Vec::new(),
                    time_step: dt,
                    steps: st.step,
                }),
            });
        }
        Ok(())
    }

    /// Snapshot of the current state.
    pub fn frame(&self) -> Frame {
        let m = &self.model;
        let x = &self.positions;
        let stress = m
            .elements
            .iter()
            .zip(&self.last_stress)
            .map(|(el, s)| {
                let xe = el.nodes.map(|i| x[i]);
                let f = el.deformation_gradient(&xe);
                let c = f.transpose() * f;
                let l3 = m.materials[el.material]
                    .response(&c, &el.fill_dir)
                    .map(|r| r.thickness_stretch_sq)
                    .unwrap_or(1.0);
                element::cauchy_stress(el, &xe, s, l3)
            })
            .collect();
        let e = self.state.energy;
        Frame {
            time: self.state.time,
            displacements: self.state.displacements.clone(),
            stress,
            energy: e,
            quasi_static: self.state.time <= self.config.transient_window
                || e.kinetic < self.config.kinetic_ratio_limit * e.internal_strain,
        }
    }

    /// Integrates to `total_time`, sampling `frame_count` evenly spaced
    /// frames ending at `total_time`.
    pub fn run(mut self) -> Result<Trajectory, SolverError> {
        let total = self.config.total_time;
        let steps = (total / self.model.dt).ceil().max(1.0) as usize;
        self.model.dt = total / steps as f64;
        let nf = self.config.frame_count;
        let mut traj = Trajectory {
            reference: self.model.reference.clone(),
            frames: Vec::with_capacity(nf),
            time_step: self.model.dt,
            steps,
        };
        let mut next = 1;
        for s in 1..=steps {
            if let Err(mut err) = self.step() {
                if let SolverError::Divergence { partial, .. } = &mut err {
                    partial.frames = std::mem::take(&mut traj.frames);
                }
                return Err(err);
            }
            while next <= nf && s * nf >= next * steps {
                let mut f = self.frame();
                f.time = total * next as f64 / nf as f64;
                traj.frames.push(f);
                next += 1;
            }
        }
        Ok(traj)
    }

    pub fn contact_rebuilds(&self) -> usize {
        self.contact.rebuilds
    }

    pub fn active_contacts(&self) -> usize {
        self.contact.active
    }

    pub fn energy(&self) -> EnergyLedger {
        self.state.energy
    }
}

/// Builds the model of `job` and integrates it to the end of its schedule.
pub fn run(job: &ScenarioJob) -> Result<Trajectory, SolverError> {
    let model = Model::build(&job.assembly, &job.materials, &job.schedule, &job.pinned_set, &job.config)?;
    Solver::new(model, job.schedule.clone(), job.config.clone())?.run()
}
