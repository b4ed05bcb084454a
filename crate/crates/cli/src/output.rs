//! CSV and JSON writers with temp-file plus rename.

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use billiard_wigner::contour::Polyline;

use crate::error::CliError;

/// Seventeen significant digits, enough for an exact `f64` round trip.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Writes `contents` to `dir/name` through a temporary sibling and a rename.
pub fn write_atomic(dir: &Path, name: &str, contents: &[u8]) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let target = dir.join(name);
    let tmp = dir.join(format!(".{name}.tmp"));
    let mut f = fs::File::create(&tmp).map_err(|e| CliError::io(&tmp, e))?;
    f.write_all(contents).map_err(|e| CliError::io(&tmp, e))?;
    f.sync_all().map_err(|e| CliError::io(&tmp, e))?;
    drop(f);
    fs::rename(&tmp, &target).map_err(|e| CliError::io(&target, e))?;
    Ok(target)
}

/// CSV with a header row; every value must be finite.
pub fn csv_table(header: &[&str], rows: impl Iterator<Item = Vec<f64>>) -> Result<String, CliError> {
    let mut out = header.join(",");
    out.push('\n');
    for (r, row) in rows.enumerate() {
        if let Some(v) = row.iter().find(|v| !v.is_finite()) {
            return Err(CliError::NonFinite(format!("row {} has value {v}", r + 1)));
        }
        let cells: Vec<String> = row.iter().map(|&v| fmt_float(v)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    Ok(out)
}

/// Contour polylines as `segment,x,p` rows; closed loops repeat their
/// first point at the end.
pub fn contour_csv(lines: &[Polyline]) -> String {
    let mut out = String::from("segment,x,p\n");
    for (k, l) in lines.iter().enumerate() {
        let closing = if l.closed { l.points.first() } else { None };
        for &(x, p) in l.points.iter().chain(closing) {
            writeln!(out, "{k},{},{}", fmt_float(x), fmt_float(p)).unwrap();
        }
    }
    out
}

/// Parses a numeric CSV written by [`csv_table`].
pub fn read_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>), String> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or("empty CSV")?
        .split(',')
        .map(str::to_string)
        .collect::<Vec<_>>();
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        let row = line
            .split(',')
            .map(|c| c.parse::<f64>().map_err(|e| format!("row {}: {e}", i + 1)))
            .collect::<Result<Vec<_>, _>>()?;
        if row.len() != header.len() {
            return Err(format!("row {} has {} cells, expected {}", i + 1, row.len(), header.len()));
        }
        rows.push(row);
    }
    Ok((header, rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        for v in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE, -0.0] {
            let s = fmt_float(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
        }
        assert_eq!(fmt_float(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_rejects_non_finite() {
        let rows = vec![vec![1.0, 2.0], vec![f64::NAN, 0.0]];
        assert!(matches!(csv_table(&["a", "b"], rows.into_iter()), Err(CliError::NonFinite(_))));
    }

    #[test]
    fn csv_round_trip() {
        let rows = vec![vec![1.0, -2.5], vec![3.25, 1e-7]];
        let text = csv_table(&["a", "b"], rows.clone().into_iter()).unwrap();
        let (h, back) = read_csv(&text).unwrap();
        assert_eq!(h, vec!["a", "b"]);
        assert_eq!(back, rows);
    }

    #[test]
    fn closed_contours_repeat_the_first_point() {
        let l = Polyline {
            points: vec![(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)],
            closed: true,
        };
        let text = contour_csv(&[l]);
        assert_eq!(text.lines().count(), 1 + 4);
    }

    #[test]
    fn atomic_write_leaves_no_temp_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = write_atomic(dir.path(), "a.txt", b"hello").unwrap();
        assert_eq!(fs::read_to_string(p).unwrap(), "hello");
        let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
        assert_eq!(names.len(), 1);
    }
}
