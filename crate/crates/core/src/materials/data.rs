//! CSV ingestion of tensile test data and curve export.
//!
//! Accepted headers are `strain,stress_MPa` and `displacement_mm,force_N`.

use std::path::Path;

use super::fitting::UniaxialTestCurve;
use super::fabric::PiecewiseLinearCurve;
use super::MaterialError;

/// Column layout of a test-data file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestDataKind {
    StrainStress,
    DisplacementForce,
}

/// Two-column test data as read from disk.
#[derive(Debug, Clone, PartialEq)]
pub struct TestData {
    pub kind: TestDataKind,
    pub samples: Vec<(f64, f64)>,
}

impl TestData {
    /// Converts to a test curve on a strip of the given geometry.
    pub fn into_curve(
        self,
        orientation: f64,
        gauge_length: f64,
        width: f64,
        height: f64,
        thickness: f64,
    ) -> Result<UniaxialTestCurve, MaterialError> {
        match self.kind {
            TestDataKind::StrainStress => {
                let c = UniaxialTestCurve {
                    orientation,
                    samples: self.samples,
                    gauge_length,
                    width,
                    height,
                    thickness,
                };
                c.validate()?;
                Ok(c)
            }
            TestDataKind::DisplacementForce => UniaxialTestCurve::from_force_displacement(
                orientation,
                &self.samples,
                gauge_length,
                width,
                height,
                thickness,
            ),
        }
    }
}

pub fn read_test_data(path: &Path) -> Result<TestData, MaterialError> {
    let file = std::fs::File::open(path).map_err(|source| MaterialError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_test_data(file, &path.display().to_string())
}

/// Parses test data from any reader; `name` is used in diagnostics.
pub fn parse_test_data<R: std::io::Read>(reader: R, name: &str) -> Result<TestData, MaterialError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let parse_err = |line: u64, column: &str, message: String| MaterialError::Parse {
        path: name.to_string(),
        line,
        column: column.to_string(),
        message,
    };
    let headers = rdr
        .headers()
        .map_err(|e| parse_err(1, "-", e.to_string()))?
        .clone();
    let cols: Vec<&str> = headers.iter().collect();
    let kind = match cols.as_slice() {
        ["strain", "stress_MPa"] => TestDataKind::StrainStress,
        ["displacement_mm", "force_N"] => TestDataKind::DisplacementForce,
        _ => {
            return Err(parse_err(
                1,
                "-",
                format!(
                    "expected header `strain,stress_MPa` or `displacement_mm,force_N`, found `{}`",
                    cols.join(",")
                ),
            ))
        }
    };
    let mut samples = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| {
            let line = e.position().map(|p| p.line()).unwrap_or(0);
            parse_err(line, "-", e.to_string())
        })?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let mut vals = [0.0; 2];
        for (i, v) in vals.iter_mut().enumerate() {
            let field = rec.get(i).unwrap_or("");
            *v = field
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| parse_err(line, cols[i], format!("not a finite number: `{field}`")))?;
        }
        samples.push((vals[0], vals[1]));
    }
    Ok(TestData { kind, samples })
}

/// Writes `(x, y)` pairs with the given two-column header.
pub fn write_pairs_csv(path: &Path, header: (&str, &str), pairs: &[(f64, f64)]) -> Result<(), MaterialError> {
    let io_err = |e: csv::Error| MaterialError::Io {
        path: path.display().to_string(),
        source: std::io::Error::other(e.to_string()),
    };
    let mut w = csv::Writer::from_path(path).map_err(io_err)?;
    w.write_record([header.0, header.1]).map_err(io_err)?;
    for (x, y) in pairs {
        w.write_record([x.to_string(), y.to_string()]).map_err(io_err)?;
    }
    w.flush().map_err(|source| MaterialError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Exports a shear curve as `gamma_rad,shear_stress_MPa`.
pub fn write_shear_curve(path: &Path, curve: &PiecewiseLinearCurve) -> Result<(), MaterialError> {
    let pts: Vec<_> = curve.points().collect();
    write_pairs_csv(path, ("gamma_rad", "shear_stress_MPa"), &pts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_layouts() {
        let a = parse_test_data("strain,stress_MPa\n0,0\n0.01,2.15\n".as_bytes(), "a").unwrap();
        assert_eq!(a.kind, TestDataKind::StrainStress);
        assert_eq!(a.samples, vec![(0.0, 0.0), (0.01, 2.15)]);
        let b = parse_test_data("displacement_mm, force_N\n0,0\n1.5,0.3\n".as_bytes(), "b").unwrap();
        assert_eq!(b.kind, TestDataKind::DisplacementForce);
    }

    #[test]
    fn reports_row_and_column() {
        let err = parse_test_data("strain,stress_MPa\n0,0\n0.01,abc\n".as_bytes(), "bad.csv").unwrap_err();
        match err {
            MaterialError::Parse { line, column, .. } => {
                assert_eq!(line, 3);
                assert_eq!(column, "stress_MPa");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_test_data("x,y\n0,0\n".as_bytes(), "h").is_err());
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.csv");
        let pairs = vec![(0.0, 0.0), (0.1, 1.0 / 3.0)];
        write_pairs_csv(&p, ("strain", "stress_MPa"), &pairs).unwrap();
        assert_eq!(read_test_data(&p).unwrap().samples, pairs);
    }
}
