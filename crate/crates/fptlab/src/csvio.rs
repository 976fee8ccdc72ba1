//! CSV formats and atomic file writes.
//!
//! Two layouts are used throughout:
//!
//! * binned density estimates: `t_left, t_right, density, stderr`
//! * sampled curves: `t, g` (densities) or `t, h` (hazards)

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::fpt::FptDensityEstimate;

/// Write `contents` to `path` through a temp file and an atomic rename, so
/// a failed run never leaves a partial file behind.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = PathBuf::from(tmp);
    fs::write(&tmp, contents)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

/// `t_left, t_right, density, stderr` rows of a binned estimate.
pub fn density_csv(estimate: &FptDensityEstimate) -> String {
    let mut out = String::from("t_left,t_right,density,stderr\n");
    for i in 0..estimate.n_bins() {
        out.push_str(&format!(
            "{},{},{},{}\n",
            estimate.bin_edges()[i],
            estimate.bin_edges()[i + 1],
            estimate.density(i),
            estimate.stderr(i)
        ));
    }
    out
}

/// Two-column curve CSV with the given value column name (`g`, `h`, ...).
pub fn curve_csv(value_name: &str, times: &[f64], values: &[f64]) -> String {
    let mut out = format!("t,{value_name}\n");
    for (t, v) in times.iter().zip(values) {
        out.push_str(&format!("{t},{v}\n"));
    }
    out
}

/// A density read back from CSV, in either layout.
#[derive(Debug, Clone)]
pub enum CsvCurve {
    /// Binned: edges (n+1) and per-bin density values (n).
    Binned { edges: Vec<f64>, density: Vec<f64> },
    /// Point samples of a curve.
    Points { times: Vec<f64>, values: Vec<f64> },
}

/// Parse either CSV layout, deciding by the header line.
pub fn read_csv(path: &Path) -> Result<CsvCurve> {
    if !path.exists() {
        return Err(Error::MissingFile(path.to_path_buf()));
    }
    let text = fs::read_to_string(path)?;
    let bad = |message: &str| Error::MalformedCsv {
        path: path.to_path_buf(),
        message: message.to_string(),
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad("empty file"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let binned = match cols.as_slice() {
        ["t_left", "t_right", "density", ..] => true,
        ["t", _] => false,
        _ => return Err(bad("unrecognized header")),
    };

    let mut fields: Vec<Vec<f64>> = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let row: std::result::Result<Vec<f64>, _> =
            line.split(',').map(|s| s.trim().parse::<f64>()).collect();
        match row {
            Ok(r) if r.len() >= 2 => fields.push(r),
            _ => return Err(bad(&format!("bad row at line {}", i + 2))),
        }
    }
    if fields.is_empty() {
        return Err(bad("no data rows"));
    }

    if binned {
        let mut edges = Vec::with_capacity(fields.len() + 1);
        let mut density = Vec::with_capacity(fields.len());
        for r in &fields {
            if r.len() < 3 {
                return Err(bad("binned rows need t_left, t_right, density"));
            }
            edges.push(r[0]);
            density.push(r[2]);
        }
        edges.push(fields[fields.len() - 1][1]);
        Ok(CsvCurve::Binned { edges, density })
    } else {
        Ok(CsvCurve::Points {
            times: fields.iter().map(|r| r[0]).collect(),
            values: fields.iter().map(|r| r[1]).collect(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fpt::EstimateKind;

    #[test]
    fn density_round_trip() {
        let est = FptDensityEstimate::from_counts(
            vec![0.0, 0.5, 1.0, 1.5],
            vec![10, 5, 0],
            5,
            EstimateKind::Conditioned,
        )
        .unwrap();
        let dir = std::env::temp_dir().join("fptlab-csv-test");
        let path = dir.join("density.csv");
        write_atomic(&path, &density_csv(&est)).unwrap();
        match read_csv(&path).unwrap() {
            CsvCurve::Binned { edges, density } => {
                assert_eq!(edges, vec![0.0, 0.5, 1.0, 1.5]);
                assert_eq!(density, vec![1.0, 0.5, 0.0]);
            }
            other => panic!("expected binned, got {other:?}"),
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn curve_round_trip() {
        let dir = std::env::temp_dir().join("fptlab-csv-test2");
        let path = dir.join("curve.csv");
        write_atomic(&path, &curve_csv("g", &[0.0, 0.1], &[1.5, 2.5])).unwrap();
        match read_csv(&path).unwrap() {
            CsvCurve::Points { times, values } => {
                assert_eq!(times, vec![0.0, 0.1]);
                assert_eq!(values, vec![1.5, 2.5]);
            }
            other => panic!("expected points, got {other:?}"),
        }
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn missing_and_malformed_files() {
        assert!(matches!(
            read_csv(Path::new("/nonexistent/x.csv")),
            Err(Error::MissingFile(_))
        ));
        let dir = std::env::temp_dir().join("fptlab-csv-test3");
        let path = dir.join("bad.csv");
        write_atomic(&path, "nonsense header\n1,2\n").unwrap();
        assert!(matches!(read_csv(&path), Err(Error::MalformedCsv { .. })));
        std::fs::remove_dir_all(&dir).ok();
    }
}
