//! Dihedral-angle bending springs between adjacent triangles.

use std::collections::BTreeMap;
use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;

/// Hinge over the shared edge `(nodes[0], nodes[1])` with opposite
/// vertices `nodes[2]` and `nodes[3]`.
#[derive(Debug, Clone, Copy)]
pub struct Hinge {
    pub nodes: [usize; 4],
    /// N·mm/rad²
    pub stiffness: f64,
    pub rest_angle: f64,
}

/// Signed dihedral angle and its gradient with respect to the four nodes.
pub fn dihedral(x: &[Vector3<f64>; 4]) -> Option<(f64, [Vector3<f64>; 4])> {
    let e = x[1] - x[0];
    let (d2, d3) = (x[2] - x[0], x[3] - x[0]);
    let e2 = e.norm_squared();
    let na = e.cross(&d2);
    let nb = d3.cross(&e);
    let (la2, lb2) = (na.norm_squared(), nb.norm_squared());
    if !(e2 > 0.0 && la2 > 0.0 && lb2 > 0.0) {
        return None;
    }
    let el = e2.sqrt();
    let theta = (na.cross(&nb).dot(&e) / el).atan2(na.dot(&nb));
    let g2 = na * (-el / la2);
    let g3 = nb * (-el / lb2);
    let a2 = d2.dot(&e) / e2;
    let a3 = d3.dot(&e) / e2;
    let g0 = -(g2 * (1.0 - a2) + g3 * (1.0 - a3));
    let g1 = -(g2 * a2 + g3 * a3);
    Some((theta, [g0, g1, g2, g3]))
}

pub fn wrap_angle(a: f64) -> f64 {
    // Differences of two angles in (−π, π] need at most one turn.
    let w = if a > PI {
        a - TAU
    } else if a <= -PI {
        a + TAU
    } else {
        a
    };
    if w > PI || w <= -PI {
        let w = (w + PI).rem_euclid(TAU) - PI;
        if w <= -PI {
            w + TAU
        } else {
            w
        }
    } else {
        w
    }
}

impl Hinge {
    /// Nodal forces and stored energy (mJ).
    pub fn evaluate(&self, x: &[Vector3<f64>; 4]) -> Option<([Vector3<f64>; 4], f64)> {
        let (theta, g) = dihedral(x)?;
        let d = wrap_angle(theta - self.rest_angle);
        let m = -self.stiffness * d;
        Some((g.map(|v| v * m), 0.5 * self.stiffness * d * d))
    }
}

/// Interior edges shared by exactly two triangles, as
/// `(edge start, edge end, opposite in first, opposite in second, tri a, tri b)`.
/// The first triangle traverses the edge from start to end.
pub fn interior_edges(tris: &[[usize; 3]]) -> Vec<[usize; 6]> {
    let mut edges: BTreeMap<(usize, usize), Vec<(usize, usize, usize, usize)>> = BTreeMap::new();
    for (t, n) in tris.iter().enumerate() {
        for k in 0..3 {
            let (a, b, c) = (n[k], n[(k + 1) % 3], n[(k + 2) % 3]);
            edges.entry((a.min(b), a.max(b))).or_default().push((a, b, c, t));
        }
    }
    edges
        .into_values()
        .filter(|v| v.len() == 2)
        .map(|v| {
            let (a, b, c, t) = v[0];
            [a, b, c, v[1].2, t, v[1].3]
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quad(fold: f64) -> [Vector3<f64>; 4] {
        [
            Vector3::new(0.0, 0.0, 0.0),
            Vector3::new(1.2, 0.1, 0.0),
            Vector3::new(0.4, 1.0, 0.1),
            Vector3::new(0.7, -0.9, fold),
        ]
    }

    #[test]
    fn gradient_matches_finite_differences() {
        for fold in [-0.8, -0.1, 0.3, 1.5] {
            let x = quad(fold);
            let (_, g) = dihedral(&x).unwrap();
            let h = 1e-6;
            for n in 0..4 {
                for d in 0..3 {
                    let mut xp = x;
                    let mut xm = x;
                    xp[n][d] += h;
                    xm[n][d] -= h;
                    let fd = (dihedral(&xp).unwrap().0 - dihedral(&xm).unwrap().0) / (2.0 * h);
                    assert!((fd - g[n][d]).abs() < 1e-6, "node {n} dir {d}: {fd} vs {}", g[n][d]);
                }
            }
        }
    }

    #[test]
    fn flat_pair_is_zero() {
        let mut x = quad(0.0);
        x[2].z = 0.0;
        assert!(dihedral(&x).unwrap().0.abs() < 1e-12);
    }

    #[test]
    fn wrap_is_symmetric() {
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-12);
        assert!((wrap_angle(-3.0 * PI / 2.0) - PI / 2.0).abs() < 1e-12);
        assert_eq!(wrap_angle(0.25), 0.25);
    }

    #[test]
    fn edges_of_two_triangles() {
        let e = interior_edges(&[[0, 1, 2], [1, 0, 3]]);
        assert_eq!(e, vec![[0, 1, 2, 3, 0, 1]]);
    }
}
