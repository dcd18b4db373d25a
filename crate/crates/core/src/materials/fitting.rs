//! Uniaxial test curves and the fits used to characterise the fabrics.

use serde::{Deserialize, Serialize};

use super::neo_hookean::uniaxial_nominal_stress;
use super::MaterialError;

/// Uniaxial tensile test in one material orientation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniaxialTestCurve {
    /// Cut orientation relative to the warp direction (0, 45 or 90 degrees).
    pub orientation: f64,
    /// `(nominal strain, nominal stress [MPa])`, starting at the origin.
    pub samples: Vec<(f64, f64)>,
    /// Gauge length L0 (mm).
    pub gauge_length: f64,
    /// Specimen width W (mm).
    pub width: f64,
    /// Specimen dimension along the load, H (mm).
    pub height: f64,
    /// Sheet thickness (mm), used to convert between force and stress.
    pub thickness: f64,
}

impl UniaxialTestCurve {
    /// Standard 20 mm × 350 mm strip with a 250 mm gauge length.
    pub fn standard_strip(orientation: f64, thickness: f64, samples: Vec<(f64, f64)>) -> Result<Self, MaterialError> {
        let curve = Self {
            orientation,
            samples,
            gauge_length: 250.0,
            width: 20.0,
            height: 250.0,
            thickness,
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<(), MaterialError> {
        if ![0.0, 45.0, 90.0].contains(&self.orientation) {
            return Err(MaterialError::InvalidParameter(format!(
                "orientation must be 0, 45 or 90 degrees, got {}",
                self.orientation
            )));
        }
        match self.samples.first() {
            Some(&(0.0, 0.0)) => {}
            _ => return Err(MaterialError::InvalidCurve("test curve must start at (0, 0)".into())),
        }
        for w in self.samples.windows(2) {
            if !(w[1].0 > w[0].0) {
                return Err(MaterialError::InvalidCurve(format!(
                    "strains must be strictly increasing ({} then {})",
                    w[0].0, w[1].0
                )));
            }
        }
        if self.samples.iter().any(|s| s.1 < 0.0) {
            return Err(MaterialError::InvalidCurve("negative stress sample".into()));
        }
        Ok(())
    }

    /// Samples as crosshead `(displacement [mm], force [N])`.
    pub fn force_displacement(&self) -> Vec<(f64, f64)> {
        let area = self.width * self.thickness;
        self.samples
            .iter()
            .map(|&(e, s)| (e * self.gauge_length, s * area))
            .collect()
    }

    /// Builds a curve from `(displacement [mm], force [N])` samples.
    pub fn from_force_displacement(
        orientation: f64,
        samples: &[(f64, f64)],
        gauge_length: f64,
        width: f64,
        height: f64,
        thickness: f64,
    ) -> Result<Self, MaterialError> {
        let area = width * thickness;
        let curve = Self {
            orientation,
            samples: samples.iter().map(|&(d, f)| (d / gauge_length, f / area)).collect(),
            gauge_length,
            width,
            height,
            thickness,
        };
        curve.validate()?;
        Ok(curve)
    }
}

/// Least-squares slope of stress against strain over `window = (lo, hi)`.
pub fn fit_secant_modulus(curve: &UniaxialTestCurve, window: (f64, f64)) -> Result<f64, MaterialError> {
    let (lo, hi) = window;
    let last = curve.samples.last().map(|s| s.0).unwrap_or(0.0);
    if lo < 0.0 || hi <= lo || hi > last * (1.0 + 1e-12) {
        return Err(MaterialError::InvalidParameter(format!(
            "strain window ({lo}, {hi}) outside sampled range [0, {last}]"
        )));
    }
    let pts: Vec<_> = curve
        .samples
        .iter()
        .filter(|(e, _)| *e >= lo - 1e-15 && *e <= hi + 1e-15)
        .collect();
    if pts.len() < 2 {
        return Err(MaterialError::InsufficientData(pts.len()));
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// Least-squares C10 of an incompressible Neo-Hookean strip against
/// nominal stress-strain data.
pub fn fit_neo_hookean_c10(curve: &UniaxialTestCurve) -> Result<f64, MaterialError> {
    let pts: Vec<_> = curve.samples.iter().filter(|s| s.0 > 0.0).collect();
    if pts.is_empty() {
        return Err(MaterialError::InsufficientData(0));
    }
    let (num, den) = pts.iter().fold((0.0, 0.0), |(num, den), &&(e, s)| {
        let g = uniaxial_nominal_stress(1.0, 1.0 + e);
        (num + s * g, den + g * g)
    });
    Ok(num / den)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn linear(e: f64) -> UniaxialTestCurve {
        let samples = (0..=20).map(|i| {
            let x = 0.0025 * i as f64;
            (x, e * x)
        });
        UniaxialTestCurve::standard_strip(0.0, 0.2, samples.collect()).unwrap()
    }

    #[test]
    fn linear_recovery() {
        assert_relative_eq!(fit_secant_modulus(&linear(215.0), (0.0, 0.05)).unwrap(), 215.0, max_relative = 1e-12);
    }

    #[test]
    fn window_errors() {
        let c = linear(215.0);
        assert!(fit_secant_modulus(&c, (0.0, 0.2)).is_err());
        assert!(matches!(
            fit_secant_modulus(&c, (0.0011, 0.0012)),
            Err(MaterialError::InsufficientData(0))
        ));
    }

    #[test]
    fn neo_hookean_round_trip() {
        let samples = (0..=30)
            .map(|i| {
                let e = 0.01 * i as f64;
                (e, uniaxial_nominal_stress(50.3, 1.0 + e))
            })
            .collect();
        let c = UniaxialTestCurve::standard_strip(0.0, 0.2, samples).unwrap();
        assert_relative_eq!(fit_neo_hookean_c10(&c).unwrap(), 50.3, max_relative = 1e-12);
    }

    #[test]
    fn force_displacement_round_trip() {
        let c = linear(4.05);
        let fd = c.force_displacement();
        let back = UniaxialTestCurve::from_force_displacement(0.0, &fd, 250.0, 20.0, 250.0, 0.2).unwrap();
        for (a, b) in c.samples.iter().zip(&back.samples) {
            assert_relative_eq!(a.0, b.0, max_relative = 1e-12);
            assert_relative_eq!(a.1, b.1, max_relative = 1e-12);
        }
    }
}
