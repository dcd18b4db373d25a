//! Constant-strain membrane triangle.

use nalgebra::{Matrix2, Matrix3x2, Vector2, Vector3};

use crate::materials::{MaterialError, MaterialModel};

/// Reference data of one triangle. Node ids are tie roots.
#[derive(Debug, Clone, Copy)]
pub struct ElementRef {
    pub nodes: [usize; 3],
    pub dm_inv: Matrix2<f64>,
    /// Reference area (mm²).
    pub area: f64,
    /// mm
    pub thickness: f64,
    pub material: usize,
    /// Fill-yarn direction in the element frame.
    pub fill_dir: Vector2<f64>,
}

/// Orthonormal in-plane frame of a triangle: the first axis is the beam
/// axis (+x) projected onto the plane, or the first edge when the triangle
/// is nearly perpendicular to the axis.
pub fn element_frame(x: &[Vector3<f64>; 3]) -> Option<(Vector3<f64>, Vector3<f64>, Vector3<f64>)> {
    let e1 = x[1] - x[0];
    let n = e1.cross(&(x[2] - x[0]));
    let len = n.norm();
    if !(len > 0.0) {
        return None;
    }
    let n = n / len;
    let axis = Vector3::x();
    let proj = axis - n * n.dot(&axis);
    let a = if proj.norm() > 0.1 { proj.normalize() } else { e1.normalize() };
    Some((a, n.cross(&a), n))
}

impl ElementRef {
    pub fn new(
        nodes: [usize; 3],
        x: &[Vector3<f64>; 3],
        thickness: f64,
        material: usize,
        fiber_angle_deg: f64,
    ) -> Option<Self> {
        let (a, b, _) = element_frame(x)?;
        let (d1, d2) = (x[1] - x[0], x[2] - x[0]);
        let dm = Matrix2::new(d1.dot(&a), d2.dot(&a), d1.dot(&b), d2.dot(&b));
        let det = dm.determinant();
        let dm_inv = dm.try_inverse()?;
        let ang = fiber_angle_deg.to_radians();
        Some(Self {
            nodes,
            dm_inv,
            area: 0.5 * det.abs(),
            thickness,
            material,
            fill_dir: Vector2::new(ang.cos(), ang.sin()),
        })
    }

    pub fn deformation_gradient(&self, x: &[Vector3<f64>; 3]) -> Matrix3x2<f64> {
        let ds = Matrix3x2::from_columns(&[x[1] - x[0], x[2] - x[0]]);
        ds * self.dm_inv
    }
}

/// Element state after a constitutive evaluation.
#[derive(Debug, Clone, Copy)]
pub struct ElementEval {
    pub forces: [Vector3<f64>; 3],
    /// mJ
    pub energy: f64,
    pub stress_pk2: Matrix2<f64>,
    pub valid: bool,
}

/// Internal nodal forces (the negative energy gradient) and stored energy.
pub fn evaluate(
    el: &ElementRef,
    model: &MaterialModel,
    x: &[Vector3<f64>; 3],
) -> Result<ElementEval, MaterialError> {
    let f = el.deformation_gradient(x);
    let c = f.transpose() * f;
    if let MaterialModel::NeoHookean(p) = model {
        if p.is_incompressible() {
            // S = 2·C10·(I − C⁻¹/det C), inlined.
            let det = c.m11 * c.m22 - c.m12 * c.m21;
            if !(det > 0.0) {
                return Err(MaterialError::InvalidDeformation(det));
            }
            let k = 2.0 * p.c10 / (det * det);
            let s = Matrix2::new(
                2.0 * p.c10 - k * c.m22,
                k * c.m12,
                k * c.m21,
                2.0 * p.c10 - k * c.m11,
            );
            let w = p.c10 * (c.m11 + c.m22 + 1.0 / det - 3.0);
            return Ok(with_stress(el, &f, s, w * el.area * el.thickness, true));
        }
    }
    let r = model.response(&c, &el.fill_dir)?;
    Ok(with_stress(el, &f, r.stress, r.energy_density * el.area * el.thickness, r.valid))
}

/// Forces for a prescribed 2nd Piola-Kirchhoff stress.
pub fn with_stress(el: &ElementRef, f: &Matrix3x2<f64>, s: Matrix2<f64>, energy: f64, valid: bool) -> ElementEval {
    let h = f * s * el.dm_inv.transpose() * (-el.area * el.thickness);
    let f1: Vector3<f64> = h.column(0).into();
    let f2: Vector3<f64> = h.column(1).into();
    ElementEval {
        forces: [-(f1 + f2), f1, f2],
        energy,
        stress_pk2: s,
        valid,
    }
}

/// In-plane Cauchy stress `[σ11, σ22, σ12]` in the current element frame.
pub fn cauchy_stress(
    el: &ElementRef,
    x: &[Vector3<f64>; 3],
    s: &Matrix2<f64>,
    thickness_stretch_sq: f64,
) -> [f64; 3] {
    let Some((a, b, _)) = element_frame(x) else {
        return [0.0; 3];
    };
    let f = el.deformation_gradient(x);
    let (c0, c1) = (f.column(0), f.column(1));
    let fl = Matrix2::new(c0.dot(&a), c1.dot(&a), c0.dot(&b), c1.dot(&b));
    let j = fl.determinant() * thickness_stretch_sq.sqrt();
    if !(j > 0.0) {
        return [0.0; 3];
    }
    let sigma = fl * s * fl.transpose() / j;
    [sigma[(0, 0)], sigma[(1, 1)], sigma[(0, 1)]]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::NeoHookeanParams;

    fn tri() -> [Vector3<f64>; 3] {
        [Vector3::zeros(), Vector3::new(2.0, 0.0, 0.0), Vector3::new(0.3, 1.5, 0.0)]
    }

    #[test]
    fn undeformed_has_no_force() {
        let x = tri();
        let el = ElementRef::new([0, 1, 2], &x, 0.2, 0, 0.0).unwrap();
        let m = MaterialModel::NeoHookean(NeoHookeanParams::incompressible(50.3).unwrap());
        let e = evaluate(&el, &m, &x).unwrap();
        for f in e.forces {
            assert!(f.norm() < 1e-12);
        }
        assert!(e.energy.abs() < 1e-12);
    }

    #[test]
    fn inlined_neo_hookean_matches_material() {
        let x = tri();
        let el = ElementRef::new([0, 1, 2], &x, 0.2, 0, 0.0).unwrap();
        let p = NeoHookeanParams::incompressible(50.3).unwrap();
        let m = MaterialModel::NeoHookean(p);
        let y = [x[0], Vector3::new(2.3, 0.2, 0.1), Vector3::new(0.2, 1.4, -0.3)];
        let fast = evaluate(&el, &m, &y).unwrap();
        let f = el.deformation_gradient(&y);
        let c = f.transpose() * f;
        let slow = p.stress(&c).unwrap();
        assert!((fast.stress_pk2 - slow).norm() < 1e-12 * slow.norm());
        let w = p.strain_energy(&c).unwrap() * el.area * el.thickness;
        assert!((fast.energy - w).abs() < 1e-12 * w);
    }

    #[test]
    fn frame_follows_axis() {
        let x = [Vector3::zeros(), Vector3::new(0.0, 1.0, 0.0), Vector3::new(1.0, 0.0, 1.0)];
        let (a, b, n) = element_frame(&x).unwrap();
        assert!(a.y.abs() < 1e-12 && a.x > 0.0);
        assert!((a.dot(&b)).abs() < 1e-12 && (b.dot(&n)).abs() < 1e-12);
    }

    #[test]
    fn collapsed_triangle_has_no_frame() {
        let x = [Vector3::zeros(), Vector3::x(), Vector3::x() * 2.0];
        assert!(ElementRef::new([0, 1, 2], &x, 0.2, 0, 0.0).is_none());
    }
}
