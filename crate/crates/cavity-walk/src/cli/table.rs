//! Deterministic CSV output.
//!
//! Tables are written as UTF-8 with LF line endings. Floats use scientific
//! notation with 12 significant digits, so a run with the same resolved
//! config reproduces the same bytes.

use std::fs;
use std::path::Path;

use super::CliError;

/// Scientific notation, 12 significant digits.
pub fn float(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn int(v: i64) -> String {
    v.to_string()
}

/// Write a rectangular CSV table; every row must match the header width.
pub fn write_csv(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        assert_eq!(row.len(), header.len(), "row width must match header");
        out.push_str(&row.join(","));
        out.push('\n');
    }
    fs::write(path, out).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Write pretty-printed JSON with a trailing newline.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Io(format!("cannot serialize {}: {e}", path.display())))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_formatting_is_stable() {
        assert_eq!(float(0.5), "5.00000000000e-1");
        assert_eq!(float(1.0), "1.00000000000e0");
        assert_eq!(float(-0.125), "-1.25000000000e-1");
        assert_eq!(float(1.0 / 3.0), "3.33333333333e-1");
    }

    #[test]
    fn csv_is_lf_terminated() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        write_csv(
            &path,
            &["a", "b"],
            vec![vec![int(1), float(2.0)], vec![int(-3), float(0.25)]],
        )
        .unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "a,b\n1,2.00000000000e0\n-3,2.50000000000e-1\n");
    }
}
