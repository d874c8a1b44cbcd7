//! Text input and output shared by the library and the command line.

use crate::{Error, Result};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Parses a square matrix written row by row, rows separated by `;` and
/// entries by `,` (for example `"1,0;0,1.3"`).
pub fn parse_matrix(text: &str) -> Result<Vec<Vec<f64>>> {
    let rows: Vec<Vec<f64>> = text
        .split(';')
        .enumerate()
        .map(|(i, row)| {
            row.split(',')
                .enumerate()
                .map(|(j, entry)| {
                    let entry = entry.trim();
                    let x: f64 = entry.parse().map_err(|_| {
                        Error::Parse(format!("matrix entry ({}, {}) {entry:?} is not a number", i + 1, j + 1))
                    })?;
                    if !x.is_finite() {
                        return Err(Error::Parse(format!("matrix entry ({}, {}) is not finite", i + 1, j + 1)));
                    }
                    Ok(x)
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<_>>()?;
    let n = rows.len();
    if !(2..=3).contains(&n) {
        return Err(Error::Parse(format!("expected a 2×2 or 3×3 matrix, found {n} rows")));
    }
    if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
        return Err(Error::Parse(format!("row {} has {} entries, expected {n}", i + 1, r.len())));
    }
    Ok(rows)
}
