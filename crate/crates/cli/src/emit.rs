//! CSV output.

use std::fs;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error("series `{name}` row {row} has {got} cells, expected {expected}")]
    Ragged {
        name: String,
        row: usize,
        got: usize,
        expected: usize,
    },
    #[error("series `{name}` row {row} column `{column}` is not finite")]
    NotFinite {
        name: String,
        row: usize,
        column: String,
    },
    #[error("cannot write {path}: {message}")]
    Io { path: String, message: String },
}

/// 17 significant digits, enough to round-trip any double.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\r', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

/// CSV text with a header row and CRLF line ends.
pub fn render_csv(name: &str, columns: &[String], rows: &[Vec<f64>]) -> Result<String, EmitError> {
    let mut out = columns
        .iter()
        .map(|c| quote(c))
        .collect::<Vec<_>>()
        .join(",");
    out.push_str("\r\n");
    for (r, row) in rows.iter().enumerate() {
        if row.len() != columns.len() {
            return Err(EmitError::Ragged {
                name: name.to_string(),
                row: r,
                got: row.len(),
                expected: columns.len(),
            });
        }
        let mut cells = Vec::with_capacity(row.len());
        for (c, v) in row.iter().enumerate() {
            if !v.is_finite() {
                return Err(EmitError::NotFinite {
                    name: name.to_string(),
                    row: r,
                    column: columns[c].clone(),
                });
            }
            cells.push(format_float(*v));
        }
        out.push_str(&cells.join(","));
        out.push_str("\r\n");
    }
    Ok(out)
}

/// Writes `<out_dir>/<name>.csv` and returns its path.
pub fn emit_series(
    name: &str,
    columns: &[String],
    rows: &[Vec<f64>],
    out_dir: &Path,
) -> Result<PathBuf, EmitError> {
    let body = render_csv(name, columns, rows)?;
    let path = out_dir.join(format!("{name}.csv"));
    fs::write(&path, body).map_err(|e| EmitError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cols(c: &[&str]) -> Vec<String> {
        c.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn header_only() {
        assert_eq!(render_csv("t", &cols(&["a", "b"]), &[]).unwrap(), "a,b\r\n");
    }

    #[test]
    fn round_trip() {
        let rows = vec![vec![0.1, -2.5e-300], vec![1.0 / 3.0, 12345.678]];
        let text = render_csv("t", &cols(&["x", "y"]), &rows).unwrap();
        let parsed: Vec<Vec<f64>> = text
            .lines()
            .skip(1)
            .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
            .collect();
        assert_eq!(parsed, rows);
    }

    #[test]
    fn nan_is_rejected() {
        assert!(matches!(
            render_csv("t", &cols(&["x"]), &[vec![f64::NAN]]),
            Err(EmitError::NotFinite { .. })
        ));
        assert!(matches!(
            render_csv("t", &cols(&["x"]), &[vec![1.0, 2.0]]),
            Err(EmitError::Ragged { .. })
        ));
    }

    #[test]
    fn quoting() {
        assert_eq!(quote("a,b"), "\"a,b\"");
        assert_eq!(quote("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
