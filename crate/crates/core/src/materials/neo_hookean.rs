//! Reduced-polynomial (N = 1) hyperelastic membrane under plane stress.
//!
//! Strain energy per reference volume:
//!
//! ```text
//! U = C10 (Ī1 − 3) + (J − 1)² / D1
//! ```
//!
//! For `D1 = 0` the material is incompressible and the out-of-plane stretch
//! follows from `λ3 = 1/√det(C)`, which gives the closed form
//! `S = 2·C10·(I − det(C)⁻¹·C⁻¹)`. For `D1 > 0` the through-thickness
//! component `C33` is solved from the plane-stress condition `∂U/∂C33 = 0`.

use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

use super::MaterialError;

/// Neo-Hookean parameters (`c10` in MPa, `d1` in 1/MPa).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NeoHookeanParams {
    pub c10: f64,
    #[serde(default)]
    pub d1: f64,
}

impl NeoHookeanParams {
    pub fn new(c10: f64, d1: f64) -> Result<Self, MaterialError> {
        let params = Self { c10, d1 };
        params.validate()?;
        Ok(params)
    }

    /// Incompressible parameters.
    pub fn incompressible(c10: f64) -> Result<Self, MaterialError> {
        Self::new(c10, 0.0)
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        if !(self.c10 > 0.0) || !self.c10.is_finite() {
            return Err(MaterialError::InvalidParameter(format!(
                "C10 must be positive, got {}",
                self.c10
            )));
        }
        if !(self.d1 >= 0.0) || !self.d1.is_finite() {
            return Err(MaterialError::InvalidParameter(format!(
                "D1 must be non-negative, got {}",
                self.d1
            )));
        }
        Ok(())
    }

    pub fn is_incompressible(&self) -> bool {
        self.d1 == 0.0
    }

    /// Small-strain shear modulus μ = 2·C10.
    pub fn shear_modulus(&self) -> f64 {
        2.0 * self.c10
    }

    /// Small-strain Young's modulus (6·C10 when incompressible).
    pub fn initial_modulus(&self) -> f64 {
        let mu = self.shear_modulus();
        if self.is_incompressible() {
            3.0 * mu
        } else {
            let bulk = 2.0 / self.d1;
            9.0 * bulk * mu / (3.0 * bulk + mu)
        }
    }

    /// Strain energy per unit reference volume for the in-plane right
    /// Cauchy-Green tensor `c`.
    pub fn strain_energy(&self, c: &Matrix2<f64>) -> Result<f64, MaterialError> {
        let det = checked_det(c)?;
        if self.is_incompressible() {
            return Ok(self.c10 * (c.trace() + 1.0 / det - 3.0));
        }
        let c33 = self.solve_c33(c, det);
        let j = (det * c33).sqrt();
        let i1 = c.trace() + c33;
        Ok(self.c10 * (i1 * j.powf(-2.0 / 3.0) - 3.0) + (j - 1.0).powi(2) / self.d1)
    }

    /// Second Piola-Kirchhoff in-plane stress (MPa).
    pub fn stress(&self, c: &Matrix2<f64>) -> Result<Matrix2<f64>, MaterialError> {
        let det = checked_det(c)?;
        let c_inv = inverse_sym(c, det);
        if self.is_incompressible() {
            return Ok((Matrix2::identity() - c_inv / det) * (2.0 * self.c10));
        }
        let c33 = self.solve_c33(c, det);
        let j = (det * c33).sqrt();
        let i1 = c.trace() + c33;
        let jm23 = j.powf(-2.0 / 3.0);
        Ok((Matrix2::identity() - c_inv * (i1 / 3.0)) * (2.0 * self.c10 * jm23)
            + c_inv * (2.0 / self.d1 * (j - 1.0) * j))
    }

    /// Through-thickness stretch squared for the given in-plane state.
    pub fn thickness_stretch_sq(&self, c: &Matrix2<f64>) -> Result<f64, MaterialError> {
        let det = checked_det(c)?;
        if self.is_incompressible() {
            Ok(1.0 / det)
        } else {
            Ok(self.solve_c33(c, det))
        }
    }

    /// Plane-stress residual `C33·∂U/∂C33` and its root.
    fn solve_c33(&self, c: &Matrix2<f64>, det: f64) -> f64 {
        let tr = c.trace();
        let residual = |c33: f64| {
            let j = (det * c33).sqrt();
            self.c10 * j.powf(-2.0 / 3.0) * (c33 - (tr + c33) / 3.0) + (j - 1.0) * j / self.d1
        };
        // The residual is increasing in C33; bracket then bisect-Newton.
        let mut lo = 1.0e-8;
        let mut hi = (1.0 / det).max(1.0);
        while residual(hi) < 0.0 {
            hi *= 2.0;
        }
        let mut x = (1.0 / det).clamp(lo, hi);
        for _ in 0..100 {
            let r = residual(x);
            if r.abs() < 1.0e-15 * (self.c10 + 1.0) {
                break;
            }
            if r > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let h = 1.0e-7 * x.max(1.0e-6);
            let slope = (residual(x + h) - residual(x - h)) / (2.0 * h);
            let newton = x - r / slope;
            x = if slope > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if (hi - lo) < 1.0e-15 * hi {
                break;
            }
        }
        x
    }
}

/// Plane-stress membrane 2nd Piola-Kirchhoff stress for the in-plane right
/// Cauchy-Green tensor `c`.
pub fn neo_hookean_membrane_stress(
    c: &Matrix2<f64>,
    params: &NeoHookeanParams,
) -> Result<Matrix2<f64>, MaterialError> {
    params.stress(c)
}

/// Nominal axial stress of an incompressible Neo-Hookean strip in uniaxial
/// tension with stretch `lambda`: `P = 2·C10·(λ − λ⁻²)`.
pub fn uniaxial_nominal_stress(c10: f64, lambda: f64) -> f64 {
    2.0 * c10 * (lambda - lambda.powi(-2))
}

fn checked_det(c: &Matrix2<f64>) -> Result<f64, MaterialError> {
    let det = c[(0, 0)] * c[(1, 1)] - c[(0, 1)] * c[(1, 0)];
    if !(det > 0.0) || !det.is_finite() {
        return Err(MaterialError::InvalidDeformation(det));
    }
    Ok(det)
}

fn inverse_sym(c: &Matrix2<f64>, det: f64) -> Matrix2<f64> {
    Matrix2::new(c[(1, 1)], -c[(0, 1)], -c[(1, 0)], c[(0, 0)]) / det
}
