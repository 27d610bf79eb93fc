//! CSV and JSON artifact helpers.

use std::collections::HashMap;
use std::path::Path;

use serde::Serialize;

use crate::error::{CliError, Result};

/// 17 significant digits, enough to round-trip any `f64`.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<R, I>(path: &Path, header: &[&str], rows: I) -> Result<()>
where
    I: IntoIterator<Item = R>,
    R: IntoIterator<Item = String>,
{
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent).map_err(CliError::io(parent))?;
    }
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(CliError::io(path))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(CliError::io(path))
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    serde_json::from_str(&text).map_err(|e| CliError::Malformed {
        path: path.into(),
        reason: e.to_string(),
    })
}

/// A CSV file held as string columns addressed by header name.
pub struct Table {
    path: std::path::PathBuf,
    index: HashMap<String, usize>,
    rows: Vec<csv::StringRecord>,
}

impl Table {
    pub fn read(path: &Path) -> Result<Self> {
        let mut r = csv::Reader::from_path(path)?;
        let index = r
            .headers()?
            .iter()
            .enumerate()
            .map(|(i, h)| (h.to_string(), i))
            .collect();
        let rows = r.records().collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            path: path.into(),
            index,
            rows,
        })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn column<T: std::str::FromStr>(&self, name: &str) -> Result<Vec<T>> {
        let &i = self.index.get(name).ok_or_else(|| CliError::Malformed {
            path: self.path.clone(),
            reason: format!("no column {name:?}"),
        })?;
        self.rows
            .iter()
            .enumerate()
            .map(|(r, rec)| {
                rec.get(i).and_then(|s| s.parse().ok()).ok_or_else(|| CliError::Malformed {
                    path: self.path.clone(),
                    reason: format!("row {}: bad {name:?} value", r + 1),
                })
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            assert_eq!(num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn table_reads_columns() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_csv(&p, &["k", "x"], (0..3).map(|k| vec![k.to_string(), num(k as f64 * 0.5)])).unwrap();
        let t = Table::read(&p).unwrap();
        assert_eq!(t.len(), 3);
        assert_eq!(t.column::<usize>("k").unwrap(), vec![0, 1, 2]);
        assert_eq!(t.column::<f64>("x").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(t.column::<f64>("y").is_err());
    }
}
