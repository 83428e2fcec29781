//! CSV tables and provenance files, written atomically.

use crate::config::ExperimentConfig;
use crate::CliError;
use serde::Serialize;
use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // 17 significant digits round-trip every f64
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.into_error()))
    }
}

/// Columns `xi_1 … xi_{n−1}` for a mode.
pub fn mode_columns(dim: usize) -> Vec<String> {
    (1..=dim).map(|k| format!("xi_{k}")).collect()
}

pub fn mode_cells(xi: &[i64]) -> impl Iterator<Item = Cell> + '_ {
    xi.iter().map(|&k| Cell::Int(k))
}

#[derive(Serialize)]
struct Meta<'a> {
    artifact: String,
    experiment: &'a str,
    tag: &'a str,
    csv: String,
    summary: &'a BTreeMap<String, toml::Value>,
    config: &'a ExperimentConfig,
}

pub fn meta_text(config: &ExperimentConfig, summary: &BTreeMap<String, toml::Value>) -> Result<String, CliError> {
    let meta = Meta {
        artifact: format!("kreinlab {}", env!("CARGO_PKG_VERSION")),
        experiment: config.kind.name(),
        tag: config.kind.tag(),
        csv: format!("{}.csv", config.name),
        summary,
        config,
    };
    toml::to_string(&meta).map_err(|e| CliError::Failed(format!("cannot serialize provenance: {e}")))
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| CliError::Io(e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_float_round_trip() {
        let mut t = Table::new(&["x", "label"]);
        let x = 0.1 + 0.2;
        t.push(vec![x.into(), "a,b".into()]);
        let text = String::from_utf8(t.to_csv().unwrap()).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("x,label"));
        let row = lines.next().unwrap();
        let value: f64 = row.split(',').next().unwrap().parse().unwrap();
        assert_eq!(value.to_bits(), x.to_bits());
        assert!(row.ends_with("\"a,b\""));
    }

    #[test]
    fn atomic_write_replaces() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("out.csv");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    }
}
