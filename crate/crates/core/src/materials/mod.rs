//! Constitutive models and material test-data processing.

pub mod bias_extension;
pub mod data;
pub mod fabric;
pub mod fitting;
pub mod library;
pub mod neo_hookean;

use std::path::Path;

use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use bias_extension::{bias_extension_shear_angle, bias_extension_shear_force, BiasSpecimen};
pub use fabric::{fabric_membrane_stress, FabricModel, FabricStress, PiecewiseLinearCurve};
pub use fitting::{fit_neo_hookean_c10, fit_secant_modulus, UniaxialTestCurve};
pub use neo_hookean::{neo_hookean_membrane_stress, NeoHookeanParams};

#[derive(Debug, Error)]
pub enum MaterialError {
    #[error("invalid material parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid deformation: det(C) = {0}")]
    InvalidDeformation(f64),
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("argument outside domain: {0}")]
    Domain(String),
    #[error("invalid specimen geometry: {0}")]
    InvalidGeometry(String),
    #[error("need at least 2 samples in the fitting window, found {0}")]
    InsufficientData(usize),
    #[error("{path}: line {line}, column {column}: {message}")]
    Parse {
        path: String,
        line: u64,
        column: String,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("material card {path}: {message}")]
    Card { path: String, message: String },
}

/// Stiffening of a bonded (glued) region relative to its base material.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompositeOverride {
    pub base: Box<MaterialModel>,
    /// Multiplier on the base stress response (≥ 1).
    pub stiffness_scale: f64,
    /// Added thickness of the adhesive layer (µm).
    pub thickness_add: f64,
}

impl CompositeOverride {
    pub fn new(base: MaterialModel, stiffness_scale: f64, thickness_add: f64) -> Result<Self, MaterialError> {
        if !(stiffness_scale >= 1.0) {
            return Err(MaterialError::InvalidParameter(format!(
                "composite stiffness scale must be ≥ 1, got {stiffness_scale}"
            )));
        }
        if !(thickness_add >= 0.0) {
            return Err(MaterialError::InvalidParameter(format!(
                "composite added thickness must be ≥ 0, got {thickness_add}"
            )));
        }
        if matches!(base, MaterialModel::Composite(_)) {
            return Err(MaterialError::InvalidParameter("nested composite override".into()));
        }
        Ok(Self {
            base: Box::new(base),
            stiffness_scale,
            thickness_add,
        })
    }
}

/// Membrane constitutive model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MaterialModel {
    NeoHookean(NeoHookeanParams),
    Fabric(FabricModel),
    Composite(CompositeOverride),
}

/// Pointwise membrane response.
#[derive(Debug, Clone, Copy)]
pub struct MembraneResponse {
    /// 2nd Piola-Kirchhoff stress in the element reference frame (MPa).
    pub stress: Matrix2<f64>,
    /// Stored energy per reference volume (mJ/mm³ = MPa).
    pub energy_density: f64,
    /// `false` when a data-driven model is evaluated past its validity range.
    pub valid: bool,
    /// Squared through-thickness stretch (1 for models without thinning).
    pub thickness_stretch_sq: f64,
}

impl MaterialModel {
    /// Response to the in-plane right Cauchy-Green tensor `c`; `fill_dir` is
    /// the reference fill-yarn direction, ignored by isotropic models.
    pub fn response(&self, c: &Matrix2<f64>, fill_dir: &Vector2<f64>) -> Result<MembraneResponse, MaterialError> {
        match self {
            MaterialModel::NeoHookean(p) => Ok(MembraneResponse {
                stress: p.stress(c)?,
                energy_density: p.strain_energy(c)?,
                valid: true,
                thickness_stretch_sq: p.thickness_stretch_sq(c)?,
            }),
            MaterialModel::Fabric(f) => {
                let det = c.determinant();
                if !(det > 0.0) {
                    return Err(MaterialError::InvalidDeformation(det));
                }
                let (stress, energy_density, valid) = f.membrane_response(c, fill_dir);
                Ok(MembraneResponse {
                    stress,
                    energy_density,
                    valid,
                    thickness_stretch_sq: 1.0,
                })
            }
            MaterialModel::Composite(comp) => {
                let mut r = comp.base.response(c, fill_dir)?;
                r.stress *= comp.stiffness_scale;
                r.energy_density *= comp.stiffness_scale;
                Ok(r)
            }
        }
    }

    /// Small-strain tangent modulus used for wave-speed estimates (MPa).
    pub fn initial_modulus(&self) -> f64 {
        match self {
            MaterialModel::NeoHookean(p) => p.initial_modulus(),
            MaterialModel::Fabric(f) => f.max_tangent_modulus(),
            MaterialModel::Composite(c) => c.base.initial_modulus() * c.stiffness_scale,
        }
    }

    /// Largest nominal tangent `dP/dλ` along the principal directions of
    /// `c` (MPa), by central differences in the Green strain.
    pub fn principal_tangent(&self, c: &Matrix2<f64>, fill_dir: &Vector2<f64>) -> Result<f64, MaterialError> {
        if let MaterialModel::NeoHookean(p) = self {
            if p.is_incompressible() {
                // Along principal value c_i: 2·C10·(1 + 3/(c_i·det C)).
                let det = c.m11 * c.m22 - c.m12 * c.m21;
                if !(det > 0.0) {
                    return Err(MaterialError::InvalidDeformation(det));
                }
                let half_tr = 0.5 * (c.m11 + c.m22);
                let c_min = half_tr - (half_tr * half_tr - det).max(0.0).sqrt();
                return Ok(2.0 * p.c10 * (1.0 + 3.0 / (c_min * det)));
            }
        }
        const H: f64 = 1.0e-6;
        let eig = c.symmetric_eigen();
        let mut best: f64 = 0.0;
        for k in 0..2 {
            let n = eig.eigenvectors.column(k).into_owned();
            let dc = n * n.transpose() * (2.0 * H);
            let s = |m: &Matrix2<f64>| -> Result<f64, MaterialError> {
                Ok(n.dot(&(self.response(m, fill_dir)?.stress * n)))
            };
            let ds = (s(&(c + dc))? - s(&(c - dc))?) / (2.0 * H);
            best = best.max(s(c)? + eig.eigenvalues[k] * ds);
        }
        Ok(best)
    }

    /// Extra thickness contributed by a composite override (mm).
    pub fn added_thickness(&self) -> f64 {
        match self {
            MaterialModel::Composite(c) => c.thickness_add * 1.0e-3,
            _ => 0.0,
        }
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        match self {
            MaterialModel::NeoHookean(p) => p.validate(),
            MaterialModel::Fabric(f) => {
                if !(f.strain_validity_limit > 0.0) {
                    return Err(MaterialError::InvalidParameter(
                        "strain validity limit must be positive".into(),
                    ));
                }
                Ok(())
            }
            MaterialModel::Composite(c) => {
                CompositeOverride::new((*c.base).clone(), c.stiffness_scale, c.thickness_add).map(|_| ())
            }
        }
    }
}

/// A named sheet material: constitutive model, nominal thickness and areal
/// density.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Material {
    pub name: String,
    /// Sheet thickness (µm).
    pub thickness_um: f64,
    /// Areal density (g/m²).
    pub areal_density_gsm: f64,
    pub model: MaterialModel,
}

impl Material {
    /// Thickness in mm.
    pub fn thickness(&self) -> f64 {
        self.thickness_um * 1.0e-3
    }

    /// Areal density in tonne/mm².
    pub fn areal_density(&self) -> f64 {
        self.areal_density_gsm * crate::GSM_TO_TONNE_PER_MM2
    }

    /// Copy of this material with a composite (glue) override applied.
    pub fn with_composite(&self, stiffness_scale: f64, thickness_add_um: f64) -> Result<Material, MaterialError> {
        Ok(Material {
            name: format!("{}_composite", self.name),
            thickness_um: self.thickness_um,
            areal_density_gsm: self.areal_density_gsm,
            model: MaterialModel::Composite(CompositeOverride::new(
                self.model.clone(),
                stiffness_scale,
                thickness_add_um,
            )?),
        })
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        if !(self.thickness_um > 0.0) || !(self.areal_density_gsm > 0.0) {
            return Err(MaterialError::InvalidParameter(format!(
                "material {}: thickness and areal density must be positive",
                self.name
            )));
        }
        self.model.validate()
    }

    /// Reads a material card (TOML key-value file).
    pub fn load_card(path: &Path) -> Result<Material, MaterialError> {
        let text = std::fs::read_to_string(path).map_err(|source| MaterialError::Io {
            path: path.display().to_string(),
            source,
        })?;
        let m: Material = toml::from_str(&text).map_err(|e| MaterialError::Card {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        m.validate()?;
        Ok(m)
    }

    pub fn to_card(&self) -> String {
        toml::to_string_pretty(self).expect("material serializes")
    }

    pub fn save_card(&self, path: &Path) -> Result<(), MaterialError> {
        std::fs::write(path, self.to_card()).map_err(|source| MaterialError::Io {
            path: path.display().to_string(),
            source,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn principal_tangent_oracles() {
        let c10 = 2.0;
        let m = MaterialModel::NeoHookean(NeoHookeanParams::incompressible(c10).unwrap());
        let dir = Vector2::x();
        // S = 2·C10·(I − C⁻¹/det C); at rest dS₁/dE₁ = 8·C10 with S = 0.
        let t0 = m.principal_tangent(&Matrix2::identity(), &dir).unwrap();
        assert!((t0 - 8.0 * c10).abs() < 1e-6);
        // Equibiaxial c = a: S = 2·C10·(1 − 1/a³), dS₁/dE₁ = 8·C10/a⁴.
        let a: f64 = 0.8;
        let t = m.principal_tangent(&(Matrix2::identity() * a), &dir).unwrap();
        let expect = 2.0 * c10 * (1.0 - a.powi(-3)) + a * 8.0 * c10 / a.powi(4);
        assert!((t - expect).abs() < 1e-5 * expect);
        assert!(t > 1.5 * t0);
        // The closed form agrees with differencing the generic response.
        let comp = MaterialModel::Composite(CompositeOverride::new(m.clone(), 1.0, 0.0).unwrap());
        let c = Matrix2::new(1.3, 0.1, 0.1, 0.7);
        let a = m.principal_tangent(&c, &dir).unwrap();
        let b = comp.principal_tangent(&c, &dir).unwrap();
        assert!((a - b).abs() < 1e-5 * a, "{a} vs {b}");
    }

    #[test]
    fn composite_scale_must_stiffen() {
        let base = MaterialModel::NeoHookean(NeoHookeanParams::incompressible(1.0).unwrap());
        assert!(CompositeOverride::new(base.clone(), 0.5, 0.0).is_err());
        assert!(CompositeOverride::new(base, 3.0, 100.0).is_ok());
    }

    #[test]
    fn composite_scales_response() {
        let base = MaterialModel::NeoHookean(NeoHookeanParams::incompressible(2.0).unwrap());
        let comp = MaterialModel::Composite(CompositeOverride::new(base.clone(), 3.0, 100.0).unwrap());
        let c = Matrix2::new(1.1, 0.02, 0.02, 0.95);
        let dir = Vector2::x();
        let a = base.response(&c, &dir).unwrap();
        let b = comp.response(&c, &dir).unwrap();
        assert!((b.stress - a.stress * 3.0).norm() < 1e-12);
        assert!((comp.added_thickness() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn card_round_trip() {
        for m in [library::tpu_nylon(), library::silicone_nylon()] {
            let text = m.to_card();
            let back: Material = toml::from_str(&text).unwrap();
            assert_eq!(back, m);
        }
    }
}
