//! Measured marker displacements, `pressure_kPa,marker,dx_mm,dy_mm,var_mm`.

use std::path::Path;

use serde::Deserialize;

use super::AnalysisError;

/// Markers measured at one pressure level, ordered by marker number.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentalRecord {
    /// kPa
    pub pressure: f64,
    /// In-plane `[dx, dy]` per marker (mm).
    pub displacements: Vec<[f64; 2]>,
    /// Trial-to-trial variation per marker (mm).
    pub variation: Vec<f64>,
}

#[derive(Deserialize)]
struct Row {
    #[serde(rename = "pressure_kPa")]
    pressure: f64,
    marker: usize,
    dx_mm: f64,
    dy_mm: f64,
    var_mm: f64,
}

pub fn read_experimental_csv(path: &Path) -> Result<Vec<ExperimentalRecord>, AnalysisError> {
    let text = std::fs::read_to_string(path).map_err(|source| AnalysisError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_experimental_csv(&text, &path.display().to_string())
}

/// Parses the CSV text; `origin` labels error messages. Records come out
/// sorted by pressure; marker numbers must run 1..=n without gaps.
pub fn parse_experimental_csv(text: &str, origin: &str) -> Result<Vec<ExperimentalRecord>, AnalysisError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows: Vec<Row> = Vec::new();
    for r in reader.deserialize() {
        let row: Row = r.map_err(|e| AnalysisError::Parse {
            path: origin.to_string(),
            line: e.position().map_or(0, |p| p.line()),
            message: e.to_string(),
        })?;
        rows.push(row);
    }
    rows.sort_by(|a, b| a.pressure.total_cmp(&b.pressure).then(a.marker.cmp(&b.marker)));
    let mut out: Vec<ExperimentalRecord> = Vec::new();
    for row in rows {
        if out.last().map_or(true, |r| r.pressure != row.pressure) {
            out.push(ExperimentalRecord {
                pressure: row.pressure,
                displacements: Vec::new(),
                variation: Vec::new(),
            });
        }
        let rec = out.last_mut().unwrap();
        if row.marker != rec.displacements.len() + 1 {
            return Err(AnalysisError::Parse {
                path: origin.to_string(),
                line: 0,
                message: format!("pressure {} kPa: marker {} out of sequence", row.pressure, row.marker),
            });
        }
        rec.displacements.push([row.dx_mm, row.dy_mm]);
        rec.variation.push(row.var_mm);
    }
    Ok(out)
}

impl ExperimentalRecord {
    pub fn at_pressure(records: &[ExperimentalRecord], pressure: f64) -> Option<&ExperimentalRecord> {
        records.iter().find(|r| (r.pressure - pressure).abs() < 1e-9)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn groups_by_pressure() {
        let text = "pressure_kPa,marker,dx_mm,dy_mm,var_mm\n\
                    20,2,0.5,4,0.1\n10,1,0,1,0\n20,1,0.1,2,0.2\n10,2,0,2.5,0\n";
        let recs = parse_experimental_csv(text, "t").unwrap();
        assert_eq!(recs.len(), 2);
        assert_eq!(recs[0].pressure, 10.0);
        assert_eq!(recs[1].displacements, vec![[0.1, 2.0], [0.5, 4.0]]);
        assert_eq!(recs[1].variation, vec![0.2, 0.1]);
    }

    #[test]
    fn gap_in_markers_rejected() {
        let text = "pressure_kPa,marker,dx_mm,dy_mm,var_mm\n10,1,0,1,0\n10,3,0,1,0\n";
        assert!(parse_experimental_csv(text, "t").is_err());
    }

    #[test]
    fn malformed_row_reports_line() {
        let text = "pressure_kPa,marker,dx_mm,dy_mm,var_mm\n10,1,0,1,0\n10,x,0,1,0\n";
        match parse_experimental_csv(text, "t") {
            Err(AnalysisError::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
    }
}
