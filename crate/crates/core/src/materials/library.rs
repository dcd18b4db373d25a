//! Built-in sheet materials.
//!
//! Raw tensile data for the two coated nylons is not available, so the
//! curves here are synthetic: linear in the yarn directions with the
//! measured moduli, and a stiffening 45° response whose initial slope is
//! the measured bias modulus.

use super::bias_extension::{bias_extension_shear_force, BiasSpecimen};
use super::fabric::{FabricModel, PiecewiseLinearCurve, DEFAULT_STRAIN_VALIDITY_LIMIT};
use super::fitting::UniaxialTestCurve;
use super::neo_hookean::NeoHookeanParams;
use super::{Material, MaterialModel};

/// Reduced-polynomial coefficient of the TPU-coated nylon (MPa).
pub const TPU_C10: f64 = 50.3;
/// Measured moduli of the TPU-coated nylon (MPa).
pub const TPU_E0: f64 = 215.0;
pub const TPU_E90: f64 = 201.0;
/// Measured moduli of the silicone-coated nylon (MPa).
pub const SILICONE_E0: f64 = 96.5;
pub const SILICONE_E45: f64 = 4.05;
pub const SILICONE_E90: f64 = 120.0;

pub const TPU_THICKNESS_UM: f64 = 200.0;
pub const SILICONE_THICKNESS_UM: f64 = 50.0;
pub const TPU_AREAL_DENSITY_GSM: f64 = 100.0;
pub const SILICONE_AREAL_DENSITY_GSM: f64 = 70.0;

/// Strain at which the synthetic 45° response has doubled its secant slope.
const BIAS_LOCKING_STRAIN: f64 = 0.2;

/// TPU-coated ripstop nylon, incompressible Neo-Hookean.
pub fn tpu_nylon() -> Material {
    Material {
        name: "tpu_nylon".into(),
        thickness_um: TPU_THICKNESS_UM,
        areal_density_gsm: TPU_AREAL_DENSITY_GSM,
        model: MaterialModel::NeoHookean(NeoHookeanParams::incompressible(TPU_C10).unwrap()),
    }
}

/// Silicone-coated ripstop nylon, data-driven fabric model.
pub fn silicone_nylon() -> Material {
    Material {
        name: "silicone_nylon".into(),
        thickness_um: SILICONE_THICKNESS_UM,
        areal_density_gsm: SILICONE_AREAL_DENSITY_GSM,
        model: MaterialModel::Fabric(silicone_fabric_model()),
    }
}

/// Nominal stress of the synthetic uniaxial response.
pub fn synthetic_stress(material: SyntheticMaterial, orientation: f64, strain: f64) -> f64 {
    match (material, orientation as i32) {
        (SyntheticMaterial::Tpu, 90) => TPU_E90 * strain,
        (SyntheticMaterial::Tpu, _) => TPU_E0 * strain,
        (SyntheticMaterial::Silicone, 0) => SILICONE_E0 * strain,
        (SyntheticMaterial::Silicone, 90) => SILICONE_E90 * strain,
        (SyntheticMaterial::Silicone, _) => {
            SILICONE_E45 * strain * (1.0 + (strain / BIAS_LOCKING_STRAIN).powi(3))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticMaterial {
    Tpu,
    Silicone,
}

/// Synthetic tensile curve on the standard 20 × 350 mm strip.
pub fn synthetic_uniaxial_curve(material: SyntheticMaterial, orientation: f64, max_strain: f64, step: f64) -> UniaxialTestCurve {
    let n = (max_strain / step).round() as usize;
    let samples = (0..=n)
        .map(|i| {
            let e = max_strain * i as f64 / n as f64;
            (e, synthetic_stress(material, orientation, e))
        })
        .collect();
    let thickness = match material {
        SyntheticMaterial::Tpu => TPU_THICKNESS_UM,
        SyntheticMaterial::Silicone => SILICONE_THICKNESS_UM,
    } * 1e-3;
    UniaxialTestCurve::standard_strip(orientation, thickness, samples).expect("synthetic curve is valid")
}

/// Shear stress curve (MPa vs rad) from a 45° bias-extension test.
pub fn shear_curve_from_bias_test(curve: &UniaxialTestCurve) -> Result<PiecewiseLinearCurve, super::MaterialError> {
    let specimen = BiasSpecimen {
        gauge_length: curve.gauge_length,
        height: curve.height,
        width: curve.width,
    };
    let shear = bias_extension_shear_force(&curve.force_displacement(), &specimen)?;
    PiecewiseLinearCurve::new(
        shear
            .into_iter()
            .map(|(g, f)| (g, f / curve.thickness))
            .collect(),
    )
}

/// Fabric model assembled from the synthetic silicone-nylon tests.
pub fn silicone_fabric_model() -> FabricModel {
    let fill = synthetic_uniaxial_curve(SyntheticMaterial::Silicone, 0.0, 0.3, 0.01);
    let warp = synthetic_uniaxial_curve(SyntheticMaterial::Silicone, 90.0, 0.3, 0.01);
    let bias = synthetic_uniaxial_curve(SyntheticMaterial::Silicone, 45.0, 0.35, 0.005);
    FabricModel {
        fill_curve: PiecewiseLinearCurve::new(fill.samples).unwrap(),
        warp_curve: PiecewiseLinearCurve::new(warp.samples).unwrap(),
        shear_curve: shear_curve_from_bias_test(&bias).expect("synthetic bias test reduces"),
        strain_validity_limit: DEFAULT_STRAIN_VALIDITY_LIMIT,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::materials::fit_secant_modulus;
    use approx::assert_relative_eq;

    #[test]
    fn synthetic_curves_reproduce_measured_moduli() {
        let cases = [
            (SyntheticMaterial::Tpu, 0.0, TPU_E0),
            (SyntheticMaterial::Tpu, 90.0, TPU_E90),
            (SyntheticMaterial::Silicone, 0.0, SILICONE_E0),
            (SyntheticMaterial::Silicone, 45.0, SILICONE_E45),
            (SyntheticMaterial::Silicone, 90.0, SILICONE_E90),
        ];
        for (m, o, e) in cases {
            let c = synthetic_uniaxial_curve(m, o, 0.3, 0.0025);
            assert_relative_eq!(fit_secant_modulus(&c, (0.0, 0.02)).unwrap(), e, max_relative = 0.01);
        }
    }

    #[test]
    fn shear_curve_is_monotone_through_origin() {
        let f = silicone_fabric_model();
        let pts: Vec<_> = f.shear_curve.points().collect();
        assert_eq!(pts[0], (0.0, 0.0));
        assert!(pts.windows(2).all(|w| w[1].1 >= w[0].1));
        // Initial shear modulus close to a quarter of the bias modulus.
        let g = f.shear_curve.value(0.02) / 0.02;
        assert!(g > 0.8 && g < 1.3, "G = {g}");
    }
}
