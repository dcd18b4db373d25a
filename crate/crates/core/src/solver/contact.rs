//! Node-to-triangle penalty contact.
//!
//! Candidate (slave, triangle) pairs are collected with a spatial hash and
//! refreshed whenever some node has moved more than a quarter of the search
//! margin since the last collection. Each candidate remembers the side of
//! the triangle the slave occupies in the reference configuration, so one-
//! and two-sided (self) contact use the same rule: a slave that crosses to the other side within
//! `max_depth` is pushed back with force `k·g·a` along the triangle normal,
//! and the reaction is spread over the triangle nodes by barycentric
//! weights. A pair only pushes after its slave has been seen on its own
//! side, so slaves sliding in sideways behind a facet are left alone.

use std::collections::HashMap;

use nalgebra::Vector3;

#[derive(Debug, Clone)]
pub struct ContactSurface {
    pub name: String,
    /// Slave tie roots.
    pub slaves: Vec<usize>,
    /// Tributary area of each slave (mm²).
    pub slave_area: Vec<f64>,
    /// Master triangles (tie roots).
    pub tris: Vec<[usize; 3]>,
    /// Triangles with a node closer than this to the slave in the reference
    /// configuration are skipped (mm).
    pub exclusion_radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Candidate {
    pair: u32,
    slave: u32,
    tri: u32,
    side: i8,
    /// Set once the slave has been seen on its own side of the triangle's
    /// plane; cleared when it passes `max_depth`. Only armed pairs push.
    armed: bool,
}

#[derive(Debug, Clone)]
pub struct ContactModel {
    pub surfaces: Vec<ContactSurface>,
    /// N/mm³
    pub penalty: f64,
    /// Search margin (mm).
    pub margin: f64,
    /// Penetrations deeper than this are ignored (mm).
    pub max_depth: f64,
    /// Fraction of critical damping on the normal approach velocity of an
    /// active contact, based on the penalty spring and the slave mass.
    pub damping_ratio: f64,
}

#[derive(Debug, Clone, Default)]
pub struct ContactState {
    candidates: Vec<Candidate>,
    anchor: Vec<Vector3<f64>>,
    nodes: Vec<usize>,
    pub rebuilds: usize,
    pub active: usize,
}

/// Closest point of the plane of `t` to `p` in barycentric coordinates,
/// with the signed distance along the unit normal.
pub fn project(p: &Vector3<f64>, t: &[Vector3<f64>; 3]) -> Option<([f64; 3], f64, Vector3<f64>)> {
    let (e1, e2) = (t[1] - t[0], t[2] - t[0]);
    let n = e1.cross(&e2);
    let a2 = n.norm_squared();
    if !(a2 > 0.0) {
        return None;
    }
    let d = p - t[0];
    let b1 = d.cross(&e2).dot(&n) / a2;
    let b2 = e1.cross(&d).dot(&n) / a2;
    let nu = n / a2.sqrt();
    Some(([1.0 - b1 - b2, b1, b2], d.dot(&nu), nu))
}

impl ContactModel {
    pub fn is_empty(&self) -> bool {
        self.surfaces.is_empty()
    }

    pub fn init_state(&self) -> ContactState {
        let mut nodes: Vec<usize> = self
            .surfaces
            .iter()
            .flat_map(|s| s.slaves.iter().copied().chain(s.tris.iter().flatten().copied()))
            .collect();
        nodes.sort_unstable();
        nodes.dedup();
        ContactState {
            nodes,
            ..Default::default()
        }
    }

    /// Refreshes the candidate list if nodes moved too far since the last
    /// search.
    pub fn update(&self, state: &mut ContactState, x: &[Vector3<f64>], reference: &[Vector3<f64>]) {
        if self.is_empty() {
            return;
        }
        let limit = 0.25 * self.margin;
        let moved = state.anchor.len() == state.nodes.len()
            && state
                .nodes
                .iter()
                .zip(&state.anchor)
                .any(|(&n, a)| (x[n] - a).norm_squared() > limit * limit);
        if state.anchor.len() != state.nodes.len() || moved {
            self.rebuild(state, x, reference);
        }
    }

    fn rebuild(&self, state: &mut ContactState, x: &[Vector3<f64>], reference: &[Vector3<f64>]) {
        let old: HashMap<(u32, u32, u32), (i8, bool)> = state
            .candidates
            .iter()
            .map(|c| ((c.pair, c.slave, c.tri), (c.side, c.armed)))
            .collect();
        let mut out = Vec::new();
        for (pi, s) in self.surfaces.iter().enumerate() {
            let mut size: f64 = 0.0;
            for t in &s.tris {
                for k in 0..3 {
                    size = size.max((x[t[k]] - x[t[(k + 1) % 3]]).norm());
                }
            }
            let cell = size.max(self.margin) + self.margin;
            let key = |p: &Vector3<f64>| {
                (
                    (p.x / cell).floor() as i64,
                    (p.y / cell).floor() as i64,
                    (p.z / cell).floor() as i64,
                )
            };
            let mut grid: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
            for (ti, t) in s.tris.iter().enumerate() {
                let mut lo = x[t[0]];
                let mut hi = x[t[0]];
                for &n in &t[1..] {
                    lo = lo.inf(&x[n]);
                    hi = hi.sup(&x[n]);
                }
                let m = Vector3::repeat(self.margin);
                let (a, b) = (key(&(lo - m)), key(&(hi + m)));
                for i in a.0..=b.0 {
                    for j in a.1..=b.1 {
                        for k in a.2..=b.2 {
                            grid.entry((i, j, k)).or_default().push(ti as u32);
                        }
                    }
                }
            }
            let excl2 = s.exclusion_radius * s.exclusion_radius;
            for (si, &node) in s.slaves.iter().enumerate() {
                let p = x[node];
                let Some(list) = grid.get(&key(&p)) else { continue };
                for &ti in list {
                    let t = s.tris[ti as usize];
                    if t.contains(&node) {
                        continue;
                    }
                    if excl2 > 0.0 && t.iter().any(|&n| (reference[n] - reference[node]).norm_squared() < excl2) {
                        continue;
                    }
                    let tx = [x[t[0]], x[t[1]], x[t[2]]];
                    let Some((b, g, _)) = project(&p, &tx) else { continue };
                    if g.abs() > self.margin + self.max_depth {
                        continue;
                    }
                    // Slack on the barycentric test scaled to the margin.
                    let slack = self.margin / size.max(1e-9);
                    if b.iter().any(|&w| w < -slack) {
                        continue;
                    }
                    let k = (pi as u32, si as u32, ti);
                    let (side, armed) = old.get(&k).copied().unwrap_or_else(|| {
                        // Side taken from the unloaded geometry, which has no
                        // penetrations; the current side only for coplanar pairs.
                        let r = project(&reference[node], &[reference[t[0]], reference[t[1]], reference[t[2]]]);
                        let g0 = r.map_or(0.0, |r| r.1);
                        let gs = if g0.abs() > 1e-6 * size { g0 } else { g };
                        let side: i8 = if gs >= 0.0 { 1 } else { -1 };
                        (side, side as f64 * g >= 0.0)
                    });
                    out.push(Candidate {
                        pair: k.0,
                        slave: k.1,
                        tri: k.2,
                        side,
                        armed,
                    });
                }
            }
        }
        state.candidates = out;
        state.anchor = state.nodes.iter().map(|&n| x[n]).collect();
        state.rebuilds += 1;
    }

    /// Adds contact forces to `forces`; returns the number of active
    /// contacts. With `motion = Some((velocities, masses))` active contacts
    /// are also damped along their normal.
    pub fn add_forces(
        &self,
        state: &mut ContactState,
        x: &[Vector3<f64>],
        motion: Option<(&[Vector3<f64>], &[f64])>,
        forces: &mut [Vector3<f64>],
    ) -> usize {
        let mut active = 0;
        let cands = &mut state.candidates;
        let mut i = 0;
        while i < cands.len() {
            let (pair, slave) = (cands[i].pair, cands[i].slave);
            let mut j = i;
            // Deepest penetration per slave.
            let mut best: Option<(f64, [f64; 3], Vector3<f64>, [usize; 3])> = None;
            while j < cands.len() && cands[j].pair == pair && cands[j].slave == slave {
                let c = &mut cands[j];
                let s = &self.surfaces[pair as usize];
                let node = s.slaves[slave as usize];
                let t = s.tris[c.tri as usize];
                if let Some((b, g, n)) = project(&x[node], &[x[t[0]], x[t[1]], x[t[2]]]) {
                    let depth = -(c.side as f64) * g;
                    if depth <= 0.0 {
                        c.armed = true;
                    } else if depth >= self.max_depth {
                        c.armed = false;
                    }
                    if c.armed
                        && depth > 0.0
                        && depth < self.max_depth
                        && b.iter().all(|&w| w >= 0.0)
                        && best.map_or(true, |bst| depth > bst.0)
                    {
                        best = Some((depth, b, n * c.side as f64, t));
                    }
                }
                j += 1;
            }
            if let Some((depth, b, n, t)) = best {
                let s = &self.surfaces[pair as usize];
                let node = s.slaves[slave as usize];
                let k = self.penalty * s.slave_area[slave as usize];
                let mut mag = k * depth;
                if let Some((v, mass)) = motion.filter(|_| self.damping_ratio > 0.0) {
                    let vm: Vector3<f64> = (0..3).map(|q| v[t[q]] * b[q]).sum();
                    let approach = (v[node] - vm).dot(&n);
                    let c = 2.0 * self.damping_ratio * (k * mass[node]).sqrt();
                    // Damping may not turn the push into a pull.
                    mag = (mag - c * approach).max(0.0);
                }
                let f = n * mag;
                forces[node] += f;
                for k in 0..3 {
                    forces[t[k]] -= f * b[k];
                }
                active += 1;
            }
            i = j;
        }
        state.active = active;
        active
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(gap: f64) -> (ContactModel, Vec<Vector3<f64>>) {
        let x = vec![
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(2.0, 0.0, 0.0),
            Vector3::new(0.0, 2.0, 0.0),
            Vector3::new(0.5, 0.5, gap),
        ];
        let m = ContactModel {
            surfaces: vec![ContactSurface {
                name: "s".into(),
                slaves: vec![3],
                slave_area: vec![1.5],
                tris: vec![[0, 1, 2]],
                exclusion_radius: 0.0,
            }],
            penalty: 10.0,
            margin: 0.5,
            max_depth: 0.5,
            damping_ratio: 0.0,
        };
        (m, x)
    }

    #[test]
    fn separated_nodes_feel_nothing() {
        let (m, x) = model(0.01);
        let mut st = m.init_state();
        m.update(&mut st, &x, &x);
        let mut f = vec![Vector3::zeros(); 4];
        assert_eq!(m.add_forces(&mut st, &x, None, &mut f), 0);
        assert!(f.iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn penetration_gives_penalty_force_and_reaction() {
        let (m, mut x) = model(0.01);
        let mut st = m.init_state();
        let reference = x.clone();
        m.update(&mut st, &x, &reference);
        x[3].z = -0.005;
        let mut f = vec![Vector3::zeros(); 4];
        assert_eq!(m.add_forces(&mut st, &x, None, &mut f), 1);
        let expect = 0.005 * 10.0 * 1.5;
        assert!((f[3].z - expect).abs() < 1e-15);
        let net: Vector3<f64> = f.iter().sum();
        assert!(net.norm() <= 1e-10 * expect);
    }

    #[test]
    fn side_is_remembered_across_rebuilds() {
        let (m, mut x) = model(-0.01);
        let mut st = m.init_state();
        let reference = x.clone();
        m.update(&mut st, &x, &reference);
        // Started below: pushing up through the facet is resisted downward.
        x[3].z = 0.004;
        let mut f = vec![Vector3::zeros(); 4];
        m.add_forces(&mut st, &x, None, &mut f);
        assert!(f[3].z < 0.0);
    }

    #[test]
    fn excluded_neighbours_are_skipped() {
        let (mut m, mut x) = model(0.01);
        m.surfaces[0].exclusion_radius = 1.0;
        let mut st = m.init_state();
        let reference = x.clone();
        m.update(&mut st, &x, &reference);
        x[3].z = -0.005;
        let mut f = vec![Vector3::zeros(); 4];
        assert_eq!(m.add_forces(&mut st, &x, None, &mut f), 0);
    }

    #[test]
    fn sideways_entry_behind_facet_is_ignored() {
        let (m, mut x) = model(0.01);
        let reference = x.clone();
        // Collected while already behind the facet but outside it.
        x[3] = Vector3::new(2.2, 0.1, -0.01);
        let mut st = m.init_state();
        m.update(&mut st, &x, &reference);
        x[3] = Vector3::new(0.5, 0.5, -0.01);
        let mut f = vec![Vector3::zeros(); 4];
        assert_eq!(m.add_forces(&mut st, &x, None, &mut f), 0);
        // Back on its own side, then through again: now it is resisted.
        x[3].z = 0.01;
        m.add_forces(&mut st, &x, None, &mut f);
        x[3].z = -0.01;
        assert_eq!(m.add_forces(&mut st, &x, None, &mut f), 1);
    }

    #[test]
    fn late_candidate_takes_reference_side() {
        // Reference above the facet; first collected later on, then pushed
        // through: it is resisted upward.
        let (m, mut x) = model(3.0);
        let reference = x.clone();
        let mut st = m.init_state();
        m.update(&mut st, &x, &reference);
        x[3].z = 0.3;
        m.update(&mut st, &x, &reference);
        x[3].z = -0.01;
        let mut f = vec![Vector3::zeros(); 4];
        assert_eq!(m.add_forces(&mut st, &x, None, &mut f), 1);
        assert!(f[3].z > 0.0);
    }

    #[test]
    fn damping_resists_approach_and_never_pulls() {
        let (mut m, mut x) = model(0.01);
        m.damping_ratio = 0.5;
        let mut st = m.init_state();
        let reference = x.clone();
        m.update(&mut st, &x, &reference);
        x[3].z = -0.005;
        let mass = [1e-6; 4];
        let k: f64 = 10.0 * 1.5;
        let c = 2.0 * 0.5 * (k * 1e-6).sqrt();
        let elastic = k * 0.005;
        let mut v = vec![Vector3::zeros(); 4];
        v[3].z = -0.2;
        let mut f = vec![Vector3::zeros(); 4];
        m.add_forces(&mut st, &x, Some((&v, &mass)), &mut f);
        assert!((f[3].z - (elastic + 0.2 * c)).abs() < 1e-12);
        let net: Vector3<f64> = f.iter().sum();
        assert!(net.norm() < 1e-12);
        // Fast separation: the damper would pull, so the force is clipped.
        v[3].z = 10.0 * elastic / c;
        let mut f = vec![Vector3::zeros(); 4];
        m.add_forces(&mut st, &x, Some((&v, &mass)), &mut f);
        assert_eq!(f[3], Vector3::zeros());
    }
}
