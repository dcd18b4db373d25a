//! Data-driven woven fabric model.
//!
//! Nominal stress along the fill and warp yarns and the in-plane shear
//! stress are read from piecewise-linear curves. The response is
//! hyperelastic: the stored energy is the sum of the integrals of the three
//! curves, so the element force is the exact gradient of a potential.

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::bias_extension;
use super::MaterialError;

/// Piecewise-linear curve through the origin, defined for `x ≥ 0` and
/// extended to negative arguments by odd symmetry. Beyond the last sample
/// the final segment slope is continued.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<(f64, f64)>", into = "Vec<(f64, f64)>")]
pub struct PiecewiseLinearCurve {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl PiecewiseLinearCurve {
    pub fn new(points: Vec<(f64, f64)>) -> Result<Self, MaterialError> {
        let Some(&(x0, y0)) = points.first() else {
            return Err(MaterialError::InvalidCurve("curve has no samples".into()));
        };
        if x0 != 0.0 || y0 != 0.0 {
            return Err(MaterialError::InvalidCurve(format!(
                "curve must start at the origin, got ({x0}, {y0})"
            )));
        }
        for w in points.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(MaterialError::InvalidCurve(format!(
                    "abscissae must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
            if w[1].1 < w[0].1 {
                return Err(MaterialError::InvalidCurve(format!(
                    "ordinates must be non-decreasing ({} then {})",
                    w[0].1, w[1].1
                )));
            }
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(MaterialError::InvalidCurve("non-finite sample".into()));
        }
        let (xs, ys) = points.into_iter().unzip();
        Ok(Self { xs, ys })
    }

    /// Linear curve `y = slope·x` sampled at the origin and `x_end`.
    pub fn linear(slope: f64, x_end: f64) -> Result<Self, MaterialError> {
        Self::new(vec![(0.0, 0.0), (x_end, slope * x_end)])
    }

    pub fn points(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn len(&self) -> usize {
        self.xs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    pub fn last_x(&self) -> f64 {
        *self.xs.last().unwrap()
    }

    /// Interpolated ordinate.
    pub fn value(&self, x: f64) -> f64 {
        if x < 0.0 {
            return -self.value(-x);
        }
        let (i, slope) = self.segment(x);
        self.ys[i] + slope * (x - self.xs[i])
    }

    /// Local slope at `x` (right-continuous).
    pub fn slope(&self, x: f64) -> f64 {
        self.segment(x.abs()).1
    }

    /// `∫₀ˣ value(s) ds` (even in x).
    pub fn integral(&self, x: f64) -> f64 {
        let x = x.abs();
        let mut acc = 0.0;
        for i in 0..self.xs.len().saturating_sub(1) {
            let (a, b) = (self.xs[i], self.xs[i + 1]);
            if x <= a {
                return acc;
            }
            let hi = x.min(b);
            let slope = (self.ys[i + 1] - self.ys[i]) / (b - a);
            let y_hi = self.ys[i] + slope * (hi - a);
            acc += 0.5 * (self.ys[i] + y_hi) * (hi - a);
            if x <= b {
                return acc;
            }
        }
        // Extrapolated tail beyond the last sample.
        let (i, slope) = self.segment(x);
        let a = self.xs[i].max(self.last_x());
        if x > a {
            let ya = self.ys[i] + slope * (a - self.xs[i]);
            let yx = self.ys[i] + slope * (x - self.xs[i]);
            acc += 0.5 * (ya + yx) * (x - a);
        }
        acc
    }

    /// Largest segment slope (used for wave-speed estimates).
    pub fn max_slope(&self) -> f64 {
        self.xs
            .windows(2)
            .zip(self.ys.windows(2))
            .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]))
            .fold(0.0, f64::max)
    }

    /// Segment index and slope governing `x ≥ 0`.
    fn segment(&self, x: f64) -> (usize, f64) {
        let n = self.xs.len();
        if n == 1 {
            return (0, 0.0);
        }
        let i = match self.xs.partition_point(|&xi| xi <= x) {
            0 => 0,
            p => (p - 1).min(n - 2),
        };
        let slope = (self.ys[i + 1] - self.ys[i]) / (self.xs[i + 1] - self.xs[i]);
        (i, slope)
    }
}

impl TryFrom<Vec<(f64, f64)>> for PiecewiseLinearCurve {
    type Error = MaterialError;

    fn try_from(points: Vec<(f64, f64)>) -> Result<Self, Self::Error> {
        Self::new(points)
    }
}

impl From<PiecewiseLinearCurve> for Vec<(f64, f64)> {
    fn from(curve: PiecewiseLinearCurve) -> Self {
        curve.points().collect()
    }
}

/// Default strain beyond which the fabric data is considered unreliable.
pub const DEFAULT_STRAIN_VALIDITY_LIMIT: f64 = 0.24;

/// Woven fabric described by fill, warp and shear curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FabricModel {
    /// Nominal stress (MPa) against nominal strain along the fill yarns.
    pub fill_curve: PiecewiseLinearCurve,
    /// Nominal stress (MPa) against nominal strain along the warp yarns.
    pub warp_curve: PiecewiseLinearCurve,
    /// Shear stress (MPa) against shear angle (rad).
    pub shear_curve: PiecewiseLinearCurve,
    #[serde(default = "default_limit")]
    pub strain_validity_limit: f64,
}

fn default_limit() -> f64 {
    DEFAULT_STRAIN_VALIDITY_LIMIT
}

/// Stress components in the yarn frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FabricStress {
    pub fill: f64,
    pub warp: f64,
    pub shear: f64,
    /// `false` once a strain exceeds the validity limit.
    pub valid: bool,
}

impl FabricModel {
    pub fn new(
        fill_curve: PiecewiseLinearCurve,
        warp_curve: PiecewiseLinearCurve,
        shear_curve: PiecewiseLinearCurve,
    ) -> Self {
        Self {
            fill_curve,
            warp_curve,
            shear_curve,
            strain_validity_limit: DEFAULT_STRAIN_VALIDITY_LIMIT,
        }
    }

    /// Shear angle matching the strain validity limit through the
    /// bias-extension kinematics (`d = limit·L0`).
    pub fn shear_validity_limit(&self) -> f64 {
        let limit = self.strain_validity_limit.min(std::f64::consts::SQRT_2 - 1.0);
        bias_extension::shear_angle_unchecked(limit, 1.0)
    }

    pub fn is_valid(&self, fill_strain: f64, warp_strain: f64, shear_angle: f64) -> bool {
        fill_strain.abs() <= self.strain_validity_limit
            && warp_strain.abs() <= self.strain_validity_limit
            && shear_angle.abs() <= self.shear_validity_limit()
    }

    /// Stored energy per reference volume at the given yarn strains.
    pub fn energy(&self, fill_strain: f64, warp_strain: f64, shear_angle: f64) -> f64 {
        self.fill_curve.integral(fill_strain)
            + self.warp_curve.integral(warp_strain)
            + self.shear_curve.integral(shear_angle)
    }

    /// Largest tangent modulus on any curve (MPa).
    pub fn max_tangent_modulus(&self) -> f64 {
        self.fill_curve.max_slope().max(self.warp_curve.max_slope())
    }

    /// In-plane 2nd Piola-Kirchhoff stress for right Cauchy-Green `c`, with
    /// the fill yarn along the unit reference direction `fill_dir` and the
    /// warp yarn perpendicular to it. Also returns the stored energy density
    /// and the validity flag.
    pub fn membrane_response(
        &self,
        c: &Matrix2<f64>,
        fill_dir: &Vector2<f64>,
    ) -> (Matrix2<f64>, f64, bool) {
        let a = *fill_dir;
        let b = Vector2::new(-a.y, a.x);
        let caa = a.dot(&(c * a));
        let cbb = b.dot(&(c * b));
        let cab = a.dot(&(c * b));
        let la = caa.sqrt();
        let lb = cbb.sqrt();
        let sin_g = (cab / (la * lb)).clamp(-0.999, 0.999);
        let gamma = sin_g.asin();
        let cos_g = (1.0 - sin_g * sin_g).sqrt();

        let stress = fabric_membrane_stress(la - 1.0, lb - 1.0, gamma, self);
        let aa = a * a.transpose();
        let bb = b * b.transpose();
        let ab = (a * b.transpose() + b * a.transpose()) * 0.5;

        let mut s = aa * (stress.fill / la) + bb * (stress.warp / lb);
        // ∂γ/∂C from sin γ = C_ab / (λa λb).
        let dsin = ab / (la * lb) - (aa / caa + bb / cbb) * (0.5 * sin_g);
        s += dsin * (2.0 * stress.shear / cos_g);
        let energy = self.energy(la - 1.0, lb - 1.0, gamma);
        (s, energy, stress.valid)
    }
}

/// Yarn-frame stresses from nominal yarn strains and shear angle.
pub fn fabric_membrane_stress(
    fill_strain: f64,
    warp_strain: f64,
    shear_angle: f64,
    model: &FabricModel,
) -> FabricStress {
    FabricStress {
        fill: model.fill_curve.value(fill_strain),
        warp: model.warp_curve.value(warp_strain),
        shear: model.shear_curve.value(shear_angle),
        valid: model.is_valid(fill_strain, warp_strain, shear_angle),
    }
}
