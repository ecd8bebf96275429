//! Deterministic CSV output: one schema header line, then rows. Floats
//! use Rust's shortest round-trip formatting, so reading a dump back
//! reproduces every value bit-exactly and two identical runs produce
//! byte-identical files.

use std::io::Write;
use std::path::Path;

/// A cell value; floats format shortest-round-trip.
#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::F(v) => write!(f, "{v}"),
            Cell::I(v) => write!(f, "{v}"),
            Cell::S(v) => write!(f, "{v}"),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

pub fn write_csv<P, R>(path: P, header: &[&str], rows: R) -> std::io::Result<()>
where
    P: AsRef<Path>,
    R: IntoIterator,
    R::Item: IntoIterator<Item = Cell>,
{
    let mut out = String::new();
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        let mut first = true;
        for cell in row {
            if !first {
                out.push(',');
            }
            first = false;
            out.push_str(&cell.to_string());
        }
        out.push('\n');
    }
    let mut file = std::fs::File::create(path)?;
    file.write_all(out.as_bytes())
}

/// Read back a dump: header names plus raw string cells per row.
pub fn read_csv(path: &Path) -> std::io::Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .map(|l| l.split(',').map(str::to_string).collect())
        .unwrap_or_default();
    let rows = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    Ok((header, rows))
}

/// Column by name, parsed as f64.
pub fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Option<Vec<f64>> {
    let idx = header.iter().position(|h| h == name)?;
    rows.iter()
        .map(|r| r.get(idx).and_then(|c| c.parse::<f64>().ok()))
        .collect()
}

/// Deterministic time tag for file names (`front_t1.5.csv`).
pub fn time_tag(t: f64) -> String {
    format!("{t}")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip_exactly() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("t.csv");
        let values = [
            1.0 / 3.0,
            2.0f64.sqrt(),
            -1.2345678901234567e-300,
            7.0,
            f64::NAN,
        ];
        write_csv(
            &path,
            &["v"],
            values.iter().map(|v| vec![Cell::F(*v)]),
        )
        .unwrap();
        let (header, rows) = read_csv(&path).unwrap();
        assert_eq!(header, vec!["v"]);
        for (row, want) in rows.iter().zip(values) {
            let got: f64 = row[0].parse().unwrap();
            if want.is_nan() {
                assert!(got.is_nan());
            } else {
                assert_eq!(got.to_bits(), want.to_bits());
            }
        }
    }

    #[test]
    fn time_tags() {
        assert_eq!(time_tag(1.5), "1.5");
        assert_eq!(time_tag(0.5), "0.5");
        assert_eq!(time_tag(2.0), "2");
    }
}
