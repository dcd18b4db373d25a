//! Pressure load channels and their amplitude curves.

use serde::{Deserialize, Serialize};

use super::SolverError;

/// Fifth-order smooth step from 0 at `t_start` to 1 at `t_end` with zero
/// first and second derivatives at both ends.
pub fn smooth_amplitude(t: f64, t_start: f64, t_end: f64) -> f64 {
    let xi = ((t - t_start) / (t_end - t_start)).clamp(0.0, 1.0);
    xi * xi * xi * (10.0 + xi * (-15.0 + 6.0 * xi))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeSegment {
    /// s
    pub t_start: f64,
    /// s
    pub t_end: f64,
}

impl AmplitudeSegment {
    pub fn at(&self, t: f64) -> f64 {
        smooth_amplitude(t, self.t_start, self.t_end)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PressureChannel {
    pub surface_set: String,
    /// kPa
    pub peak_pressure: f64,
    pub amplitude: AmplitudeSegment,
}

impl PressureChannel {
    /// Pressure at time `t` (MPa).
    pub fn pressure(&self, t: f64) -> f64 {
        self.peak_pressure * crate::KPA_TO_MPA * self.amplitude.at(t)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct LoadSchedule {
    pub channels: Vec<PressureChannel>,
}

impl LoadSchedule {
    pub fn validate(&self) -> Result<(), SolverError> {
        for c in &self.channels {
            if !(c.amplitude.t_end > c.amplitude.t_start) {
                return Err(SolverError::InvalidConfig(format!(
                    "channel {}: amplitude must end after it starts",
                    c.surface_set
                )));
            }
            if !(c.peak_pressure >= 0.0) || !c.peak_pressure.is_finite() {
                return Err(SolverError::InvalidConfig(format!(
                    "channel {}: pressure must be non-negative",
                    c.surface_set
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn endpoints_and_midpoint() {
        assert_eq!(smooth_amplitude(0.0, 0.0, 1.0), 0.0);
        assert_eq!(smooth_amplitude(1.0, 0.0, 1.0), 1.0);
        assert!((smooth_amplitude(0.5, 0.0, 1.0) - 0.5).abs() < 1e-15);
        assert_eq!(smooth_amplitude(-3.0, 0.1, 1.1), 0.0);
        assert_eq!(smooth_amplitude(7.0, 0.1, 1.1), 1.0);
    }

    #[test]
    fn value_at_one_fifth() {
        // 10·0.008 − 15·0.0016 + 6·0.00032
        let expect = 0.08 - 0.024 + 0.00192;
        assert!((smooth_amplitude(0.2, 0.0, 1.0) - expect).abs() < 1e-15);
        assert!((expect - 0.05792).abs() < 1e-15);
    }

    #[test]
    fn end_derivatives_vanish() {
        let h = 1e-4;
        for t in [0.0, 1.0] {
            let d1 = (smooth_amplitude(t + h, 0.0, 1.0) - smooth_amplitude(t - h, 0.0, 1.0)) / (2.0 * h);
            assert!(d1.abs() < 1e-6);
        }
    }

    #[test]
    fn pressure_converts_kpa() {
        let c = PressureChannel {
            surface_set: "s".into(),
            peak_pressure: 2.0,
            amplitude: AmplitudeSegment { t_start: 0.0, t_end: 0.1 },
        };
        assert!((c.pressure(0.5) - 0.002).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn monotone_and_odd_symmetric(a in 0.0f64..1.0, b in 0.0f64..1.0) {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            prop_assert!(smooth_amplitude(lo, 0.0, 1.0) <= smooth_amplitude(hi, 0.0, 1.0));
            let s = smooth_amplitude(a, 0.0, 1.0) + smooth_amplitude(1.0 - a, 0.0, 1.0);
            prop_assert!((s - 1.0).abs() < 1e-12);
        }
    }
}
