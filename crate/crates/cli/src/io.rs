//! CSV input and output.
//!
//! Grid fields are stored one node per row in storage order (first axis
//! fastest) under the header `x[,y[,z]],value`. Floats are written by [`num`],
//! which round-trips, so repeated runs produce identical
//! bytes.

use std::path::Path;

use stefan_core::diagnostics::CertificateReport;
use stefan_core::{Grid, GridFunction};

use crate::error::{CliError, CliResult};

const AXES: [&str; 3] = ["x", "y", "z"];

fn write_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// Writes `header` and `rows` as CSV.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> CliResult<()> {
    let mut w = csv::Writer::from_path(path).map_err(|e| write_err(path, e))?;
    w.write_record(header).map_err(|e| write_err(path, e))?;
    for r in rows {
        w.write_record(r).map_err(|e| write_err(path, e))?;
    }
    w.flush().map_err(|e| write_err(path, e))
}

/// Formats a float compactly: plain notation for moderate magnitudes,
/// exponent notation otherwise. Both forms round-trip exactly.
pub fn num(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-4..1e6).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn write_field(path: &Path, u: &GridFunction) -> CliResult<()> {
    let g = u.grid();
    let mut header: Vec<&str> = AXES[..g.dim()].to_vec();
    header.push("value");
    let rows: Vec<Vec<String>> = (0..g.node_count())
        .map(|n| {
            let x = g.coordinates(n);
            let mut row: Vec<String> = x[..g.dim()].iter().map(|v| num(*v)).collect();
            row.push(num(u.values()[n]));
            row
        })
        .collect();
    write_table(path, &header, &rows)
}

/// Reads a field written by [`write_field`] (or any CSV with the same
/// layout) onto `grid`, checking the node coordinates.
pub fn read_field(path: &Path, grid: &Grid) -> CliResult<GridFunction> {
    let bad = |msg: String| CliError::config(format!("{}: {msg}", path.display()));
    let mut r = csv::Reader::from_path(path).map_err(|e| match e.into_kind() {
        csv::ErrorKind::Io(source) => CliError::Read {
            path: path.to_path_buf(),
            source,
        },
        other => bad(format!("{other:?}")),
    })?;
    let n = grid.dim();
    let mut values = Vec::with_capacity(grid.node_count());
    for (k, rec) in r.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() != n + 1 {
            return Err(bad(format!(
                "row {} has {} columns, expected {}",
                k + 1,
                rec.len(),
                n + 1
            )));
        }
        let nums = rec
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| bad(format!("row {}: {e}", k + 1)))?;
        if k >= grid.node_count() {
            return Err(bad(format!("more than {} rows", grid.node_count())));
        }
        let x = grid.coordinates(k);
        for i in 0..n {
            if (nums[i] - x[i]).abs() > 1e-9 * (1.0 + x[i].abs()) {
                return Err(bad(format!(
                    "row {} has {} = {}, grid node is at {}",
                    k + 1,
                    AXES[i],
                    nums[i],
                    x[i]
                )));
            }
        }
        values.push(nums[n]);
    }
    if values.len() != grid.node_count() {
        return Err(bad(format!(
            "{} rows for {} grid nodes",
            values.len(),
            grid.node_count()
        )));
    }
    GridFunction::new(grid.clone(), values).map_err(|e| bad(e.to_string()))
}

pub const CERTIFICATE_HEADER: [&str; 6] = ["name", "anchor", "measured", "bound", "margin", "pass"];

pub fn certificate_rows(rep: &CertificateReport) -> Vec<Vec<String>> {
    rep.entries
        .iter()
        .map(|c| {
            vec![
                c.name.clone(),
                c.anchor.to_string(),
                num(c.measured),
                num(c.bound),
                num(c.margin),
                c.pass.to_string(),
            ]
        })
        .collect()
}

pub fn write_certificates(path: &Path, rep: &CertificateReport) -> CliResult<()> {
    write_table(path, &CERTIFICATE_HEADER, &certificate_rows(rep))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn field_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = Grid::new(&[3, 2], &[(0.0, 1.5), (-1.0, 1.0)]).unwrap();
        let u = GridFunction::from_fn(&g, |x| x[0] * 0.1 + x[1] / 3.0);
        let path = dir.path().join("u.csv");
        write_field(&path, &u).unwrap();
        let v = read_field(&path, &g).unwrap();
        assert_eq!(u, v);
        let other = Grid::unit(&[3, 2]).unwrap();
        assert!(read_field(&path, &other).is_err());
    }
}
