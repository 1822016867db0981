//! Matrix paths as CSV: `t`, the row-major entries as `gIJ_re,gIJ_im`
//! pairs, then `defect` (empty when no group was given).

use std::io::{Read, Write};

use ncde_core::linalg::CMatrix;
use ncde_core::solver::{GroupSpec, MatPath};
use ncde_core::Complex64 as C;

use crate::json::FormatError;

/// 17 significant digits.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn header(dim: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for i in 0..dim {
        for j in 0..dim {
            h.push(format!("g{i}{j}_re"));
            h.push(format!("g{i}{j}_im"));
        }
    }
    h.push("defect".to_string());
    h
}

pub fn write_csv<W: Write>(out: W, path: &MatPath, group: Option<&GroupSpec>) -> csv::Result<()> {
    let dim = path.values.first().map_or(0, CMatrix::rows);
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(dim))?;
    for (t, g) in path.times.iter().zip(&path.values) {
        let mut row = Vec::with_capacity(2 + 2 * dim * dim);
        row.push(float(*t));
        for c in g.as_slice() {
            row.push(float(c.re));
            row.push(float(c.im));
        }
        row.push(group.map(|s| float(s.group_defect(g))).unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of a CSV written by [`write_csv`]: times, matrices and defects.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvPath {
    pub times: Vec<f64>,
    pub values: Vec<CMatrix>,
    pub defects: Vec<Option<f64>>,
}

pub fn read_csv<R: Read>(input: R) -> Result<CsvPath, FormatError> {
    let mut r = csv::Reader::from_reader(input);
    let bad = |m: &str| FormatError::Schema(format!("matrix path CSV: {m}"));
    let width = r.headers().map_err(|e| bad(&e.to_string()))?.len();
    if width < 4 || (width - 2) % 2 != 0 {
        return Err(bad("unexpected column count"));
    }
    let entries = (width - 2) / 2;
    let dim = (entries as f64).sqrt().round() as usize;
    if dim * dim != entries {
        return Err(bad("entry columns do not form a square matrix"));
    }
    let mut out = CsvPath { times: Vec::new(), values: Vec::new(), defects: Vec::new() };
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(&e.to_string()))?;
        let field = |i: usize| -> Result<f64, FormatError> {
            rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| bad("non-numeric field"))
        };
        out.times.push(field(0)?);
        let mut g = CMatrix::zeros(dim, dim);
        for k in 0..entries {
            g[(k / dim, k % dim)] = C::new(field(1 + 2 * k)?, field(2 + 2 * k)?);
        }
        out.values.push(g);
        let d = rec.get(width - 1).unwrap_or("");
        out.defects.push(if d.is_empty() { None } else { Some(field(width - 1)?) });
    }
    Ok(out)
}
