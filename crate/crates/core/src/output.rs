//! Tabular output: CSV with a one-line `#` manifest header, or JSON lines.

use std::fmt::Write as _;

use serde_json::{Map, Value};

use crate::expsums::BoundReport;
use crate::harness::RatioResult;

/// What produced an output file.
#[derive(Clone, Debug, PartialEq)]
pub struct Manifest {
    pub command: String,
    pub params: Vec<(String, String)>,
    pub seed: u64,
    pub prec: u32,
    pub version: String,
}

fn quote_if_needed(v: &str) -> String {
    if v.is_empty() || v.contains(|c: char| c.is_whitespace() || c == '"' || c == '=') {
        format!("\"{}\"", v.replace('\\', "\\\\").replace('"', "\\\""))
    } else {
        v.to_string()
    }
}

impl Manifest {
    pub fn new(command: &str, seed: u64, prec: u32) -> Self {
        Manifest {
            command: command.to_string(),
            params: Vec::new(),
            seed,
            prec,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.to_string(), value.to_string()));
        self
    }

    /// `# gal <version> command=.. seed=.. prec=.. key=value ...`
    pub fn header(&self) -> String {
        let mut s = format!("# gal {} command={} seed={} prec={}", self.version, self.command, self.seed, self.prec);
        for (k, v) in &self.params {
            let _ = write!(s, " {k}={}", quote_if_needed(v));
        }
        s
    }

    pub fn to_json(&self) -> Value {
        let params: Map<String, Value> = self.params.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        serde_json::json!({
            "manifest": {
                "tool": "gal",
                "version": self.version,
                "command": self.command,
                "seed": self.seed,
                "prec": self.prec,
                "params": params,
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i128)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

/// 15 significant digits.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.14e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => fmt_float(*v),
            Cell::Bool(v) => v.to_string(),
            Cell::Empty => String::new(),
            Cell::Text(t) if t.contains([',', '"', '\n', '\r']) => format!("\"{}\"", t.replace('"', "\"\"")),
            Cell::Text(t) => t.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => i64::try_from(*v).map(Value::from).unwrap_or_else(|_| Value::String(v.to_string())),
            // re-parsing the 15-digit form keeps CSV and JSON values identical
            Cell::Float(v) if v.is_finite() => Value::from(fmt_float(*v).parse::<f64>().unwrap_or(*v)),
            Cell::Float(v) => Value::String(fmt_float(*v)),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(t) => Value::String(t.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn to_csv(&self, manifest: &Manifest) -> String {
        let mut s = manifest.header();
        s.push('\n');
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    /// One manifest object, then one object per row.
    pub fn to_json_lines(&self, manifest: &Manifest) -> String {
        let mut s = manifest.to_json().to_string();
        s.push('\n');
        for row in &self.rows {
            let obj: Map<String, Value> = self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
            s.push_str(&Value::Object(obj).to_string());
            s.push('\n');
        }
        s
    }

    pub fn render(&self, manifest: &Manifest, json: bool) -> String {
        if json {
            self.to_json_lines(manifest)
        } else {
            self.to_csv(manifest)
        }
    }

    pub fn from_ratios(rows: &[RatioResult]) -> Table {
        let mut t = Table::new(&["x", "delta", "s_x_delta", "s_x", "ratio"]);
        for r in rows {
            t.push(vec![r.x.into(), r.delta.into(), r.s_x_delta.into(), r.s_x.into(), r.ratio.into()]);
        }
        t
    }

    /// Columns: label, measured, bound_rhs, fitted_constant, then the union of
    /// all context keys in sorted order.
    pub fn from_reports(reports: &[BoundReport]) -> Table {
        let mut keys: Vec<&String> = reports.iter().flat_map(|r| r.context.keys()).collect();
        keys.sort();
        keys.dedup();
        let mut cols = vec!["label", "measured", "bound_rhs", "fitted_constant"];
        cols.extend(keys.iter().map(|k| k.as_str()));
        let mut t = Table::new(&cols);
        for r in reports {
            let mut row: Vec<Cell> = vec![r.label.as_str().into(), r.measured.into(), r.bound_rhs.into(), r.fitted_constant.into()];
            row.extend(keys.iter().map(|k| r.context.get(*k).map_or(Cell::Empty, |&v| Cell::Float(v))));
            t.push(row);
        }
        t
    }
}
