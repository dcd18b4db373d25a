//! Bias-extension (45° uniaxial) test reduction to a shear curve.
//!
//! The central zone of a ±45° specimen deforms in pure shear. The shear
//! angle follows from the crosshead displacement `d`:
//!
//! ```text
//! γ = π/2 − 2·arccos((L0 + d) / (√2·L0))
//! ```
//!
//! and the normalised shear force obeys a recursive relation in which
//! `F_sh(γ)` depends on `F_sh(γ/2)`. The recursion is resolved by a forward
//! sweep over increasing γ, interpolating into the part of the curve
//! already computed.

use std::f64::consts::SQRT_2;

use super::MaterialError;

/// Largest admissible crosshead displacement for gauge length `l0`.
pub fn max_displacement(l0: f64) -> f64 {
    (SQRT_2 - 1.0) * l0
}

/// Shear angle (rad) in the pure-shear zone for displacement `d` (mm).
pub fn bias_extension_shear_angle(d: f64, l0: f64) -> Result<f64, MaterialError> {
    if !(l0 > 0.0) {
        return Err(MaterialError::InvalidParameter(format!(
            "gauge length must be positive, got {l0}"
        )));
    }
    let arg = (l0 + d) / (SQRT_2 * l0);
    if !(-1.0..=1.0).contains(&arg) || d < 0.0 || d > max_displacement(l0) * (1.0 + 1e-12) {
        return Err(MaterialError::Domain(format!(
            "displacement {d} mm outside [0, {}] for L0 = {l0} mm",
            max_displacement(l0)
        )));
    }
    Ok(shear_angle_unchecked(d, l0))
}

/// Same map, rearranged as `γ = 2·asin((δ² + 2δ)/((1 + δ) + √(1 − 2δ − δ²)))`
/// with `δ = d/L0` so small displacements keep full relative precision.
pub(crate) fn shear_angle_unchecked(d: f64, l0: f64) -> f64 {
    let delta = d / l0;
    let root = (1.0 - 2.0 * delta - delta * delta).max(0.0).sqrt();
    let half_sin = (delta * delta + 2.0 * delta) / ((1.0 + delta) + root);
    2.0 * half_sin.clamp(-1.0, 1.0).asin()
}

/// Inverse of [`bias_extension_shear_angle`].
pub fn displacement_for_shear_angle(gamma: f64, l0: f64) -> f64 {
    // √2·cos(π/4 − x) − 1 = sin x − 2 sin²(x/2), x = γ/2.
    let q = (0.25 * gamma).sin();
    l0 * ((0.5 * gamma).sin() - 2.0 * q * q)
}

/// Bias-extension specimen dimensions (mm).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasSpecimen {
    /// Gauge length L0.
    pub gauge_length: f64,
    /// Dimension along the loading direction, H.
    pub height: f64,
    /// Dimension across the loading direction, W.
    pub width: f64,
}

impl BiasSpecimen {
    pub fn validate(&self) -> Result<(), MaterialError> {
        if !(self.gauge_length > 0.0 && self.width > 0.0 && self.height > 0.0) {
            return Err(MaterialError::InvalidParameter(
                "specimen dimensions must be positive".into(),
            ));
        }
        if 2.0 * self.height - 3.0 * self.width <= 0.0 {
            return Err(MaterialError::InvalidGeometry(format!(
                "2H − 3W must be positive (H = {}, W = {})",
                self.height, self.width
            )));
        }
        Ok(())
    }
}

/// Converts `(d [mm], F [N])` samples of a 45° test into the normalised
/// shear curve `(γ [rad], F_sh [N/mm])`.
pub fn bias_extension_shear_force(
    samples: &[(f64, f64)],
    specimen: &BiasSpecimen,
) -> Result<Vec<(f64, f64)>, MaterialError> {
    specimen.validate()?;
    let BiasSpecimen {
        gauge_length: l0,
        height: h,
        width: w,
    } = *specimen;
    match samples.first() {
        Some(&(d0, f0)) if d0 == 0.0 && f0 == 0.0 => {}
        _ => {
            return Err(MaterialError::InvalidCurve(
                "bias-extension samples must start at (0, 0)".into(),
            ))
        }
    }
    let denom = 2.0 * h - 3.0 * w;
    let mut curve: Vec<(f64, f64)> = vec![(0.0, 0.0)];
    for pair in samples.windows(2) {
        let (d_prev, (d, force)) = (pair[0].0, pair[1]);
        if !(d > d_prev) {
            return Err(MaterialError::InvalidCurve(format!(
                "displacements must be strictly increasing ({d_prev} then {d})"
            )));
        }
        let gamma = bias_extension_shear_angle(d, l0)?;
        let (half_s, half_c) = (0.5 * gamma).sin_cos();
        let lhs = denom * gamma.cos();
        let driving = (h / w - 1.0) * force * (half_c - half_s);
        let (g_last, f_last) = *curve.last().unwrap();
        let half = 0.5 * gamma;
        let value = if half <= g_last {
            let f_half = interpolate(&curve, half);
            (driving - w * f_half * half_c) / lhs
        } else {
            // γ/2 lies in the segment being built: F_sh(γ/2) is linear in
            // the unknown F_sh(γ), solve the resulting scalar equation.
            let t = (half - g_last) / (gamma - g_last);
            let coupling = w * half_c;
            (driving - coupling * (1.0 - t) * f_last) / (lhs + coupling * t)
        };
        curve.push((gamma, value));
    }
    Ok(curve)
}

fn interpolate(curve: &[(f64, f64)], x: f64) -> f64 {
    let i = curve.partition_point(|p| p.0 <= x).clamp(1, curve.len() - 1);
    let (x0, y0) = curve[i - 1];
    let (x1, y1) = curve[i];
    if x1 == x0 {
        return y0;
    }
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    const SPECIMEN: BiasSpecimen = BiasSpecimen {
        gauge_length: 250.0,
        height: 250.0,
        width: 20.0,
    };

    #[test]
    fn endpoints() {
        assert!(bias_extension_shear_angle(0.0, 250.0).unwrap().abs() < 1e-12);
        let top = bias_extension_shear_angle(max_displacement(250.0), 250.0).unwrap();
        assert!((top - FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn reference_value() {
        let g = bias_extension_shear_angle(25.0, 250.0).unwrap();
        let expected = FRAC_PI_2 - 2.0 * (1.1 / SQRT_2).acos();
        assert_relative_eq!(g, expected, max_relative = 1e-14);
        assert!((g - 0.2114).abs() < 5e-4);
    }

    #[test]
    fn out_of_domain() {
        assert!(matches!(
            bias_extension_shear_angle(-1.0, 250.0),
            Err(MaterialError::Domain(_))
        ));
        assert!(bias_extension_shear_angle(120.0, 250.0).is_err());
    }

    #[test]
    fn zero_seed_curve() {
        let curve = bias_extension_shear_force(&[(0.0, 0.0)], &SPECIMEN).unwrap();
        assert_eq!(curve, vec![(0.0, 0.0)]);
    }

    #[test]
    fn degenerate_specimen() {
        let bad = BiasSpecimen {
            gauge_length: 250.0,
            height: 30.0,
            width: 20.0,
        };
        assert!(matches!(
            bias_extension_shear_force(&[(0.0, 0.0), (1.0, 1.0)], &bad),
            Err(MaterialError::InvalidGeometry(_))
        ));
    }

    #[test]
    fn small_angle_limit_matches_linearised_relation() {
        // For F_sh = kγ at small γ the relation reduces to
        // k γ (2H − 3W) = (H/W − 1) F − W k γ / 2.
        let d = 0.01;
        let force = 0.02;
        let curve = bias_extension_shear_force(&[(0.0, 0.0), (d, force)], &SPECIMEN).unwrap();
        let (g, f) = curve[1];
        let (h, w) = (SPECIMEN.height, SPECIMEN.width);
        let k = (h / w - 1.0) * force / (g * (2.0 * h - 3.0 * w + 0.5 * w));
        assert_relative_eq!(f, k * g, max_relative = 1e-4);
    }

    #[test]
    fn sweep_is_stable_under_refinement() {
        let force = |d: f64| 0.08 * d + 2e-4 * d * d;
        let sample = |n: usize| -> Vec<(f64, f64)> {
            let dmax = 0.24 * 250.0;
            (0..=n).map(|i| {
                let d = dmax * i as f64 / n as f64;
                (d, force(d))
            }).collect()
        };
        let coarse = bias_extension_shear_force(&sample(60), &SPECIMEN).unwrap();
        let fine = bias_extension_shear_force(&sample(120), &SPECIMEN).unwrap();
        for &(g, f) in coarse.iter().skip(1) {
            let rel = (interpolate(&fine, g) - f).abs() / f.abs();
            assert!(rel < 0.01, "γ = {g}: rel diff {rel}");
        }
    }

    proptest! {
        #[test]
        fn angle_is_monotone_and_invertible(a in 0.01f64..100.0, b in 0.01f64..100.0) {
            let l0 = 250.0;
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assume!(hi - lo > 1e-6);
            let g_lo = bias_extension_shear_angle(lo, l0).unwrap();
            let g_hi = bias_extension_shear_angle(hi, l0).unwrap();
            prop_assert!(g_hi > g_lo);
            let back = displacement_for_shear_angle(g_hi, l0);
            prop_assert!(((back - hi) / hi).abs() < 1e-10);
        }
    }
}
