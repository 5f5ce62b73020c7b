//! Tabular output in CSV or JSON, written atomically.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::input(format!(
                "unknown output format `{s}` (expected csv or json)"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt_num(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => Value::from(*v + 0.0),
            Cell::Num(_) | Cell::Empty => Value::Null,
            Cell::Int(v) => Value::from(*v),
            Cell::Text(s) => Value::from(s.as_str()),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_num(v: f64) -> String {
    // adding +0.0 turns -0.0 into 0.0
    format!("{:.16e}", v + 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Trailing `# key=value` lines in CSV, a `footer` object in JSON.
    pub footer: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Table {
            header,
            rows: Vec::new(),
            footer: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.header).expect("in-memory write");
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv)).expect("in-memory write");
                }
                let bytes = w.into_inner().expect("in-memory flush");
                let mut out = String::from_utf8(bytes).expect("cells are UTF-8");
                for (k, v) in &self.footer {
                    let _ = writeln!(out, "# {k}={}", v.csv());
                }
                out
            }
            Format::Json => {
                let records: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> =
                            self.header.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                        Value::Object(obj)
                    })
                    .collect();
                let mut top = Map::new();
                top.insert("records".into(), Value::Array(records));
                if !self.footer.is_empty() {
                    let footer: Map<String, Value> = self.footer.iter().map(|(k, v)| (k.clone(), v.json())).collect();
                    top.insert("footer".into(), Value::Object(footer));
                }
                let mut s = serde_json::to_string_pretty(&Value::Object(top)).expect("JSON values serialize");
                s.push('\n');
                s
            }
        }
    }
}

/// Write `contents` to `path` through a temporary sibling and a rename.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let tmp = tmp_path(path);
    fs::write(&tmp, contents)
        .and_then(|_| fs::rename(&tmp, path))
        .map_err(|e| {
            let _ = fs::remove_file(&tmp);
            Error::input(format!("cannot write {}: {e}", path.display()))
        })
}

fn tmp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(".tmp");
    path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(vec!["a".into(), "b".into()]);
        t.push(vec![Cell::Num(0.1), Cell::Empty]);
        t.footer.push(("x".into(), Cell::Int(3)));
        let csv = t.render(Format::Csv);
        assert_eq!(csv, "a,b\n1.0000000000000001e-1,\n# x=3\n");
        let json: Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(json["records"][0]["a"].as_f64(), Some(0.1));
        assert!(json["records"][0]["b"].is_null());
        assert_eq!(json["footer"]["x"], 3);
    }

    #[test]
    fn number_text_round_trips() {
        for v in [std::f64::consts::PI, 1e-300, -2.5e17, 0.41421356237309503] {
            assert_eq!(fmt_num(v).parse::<f64>().unwrap(), v);
        }
    }
}
