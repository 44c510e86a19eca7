//! Tables with a config header, written as CSV or JSON.

use std::fmt;
use std::io::Write;

use serde::ser::{SerializeMap, Serializer};
use serde::Serialize;

use crate::params::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Real(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Real(v) if v.is_infinite() => f.write_str(if *v > 0.0 { "inf" } else { "-inf" }),
            // shortest round-trip form, with an exponent for tiny and huge values
            Cell::Real(v) => match serde_json::Number::from_f64(*v) {
                Some(n) => write!(f, "{n}"),
                None => f.write_str("nan"),
            },
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Text(s) => f.write_str(s),
            Cell::Bool(b) => write!(f, "{b}"),
            Cell::Empty => Ok(()),
        }
    }
}

impl Serialize for Cell {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            // JSON has no infinity; keep it readable rather than null
            Cell::Real(v) if !v.is_finite() => s.serialize_str(&self.to_string()),
            Cell::Real(v) => s.serialize_f64(*v),
            Cell::Int(v) => s.serialize_u64(*v),
            Cell::Text(t) => s.serialize_str(t),
            Cell::Bool(b) => s.serialize_bool(*b),
            Cell::Empty => s.serialize_none(),
        }
    }
}

/// A named pass/fail outcome with the measured residual and its tolerance.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub residual: f64,
    pub tolerance: f64,
    pub detail: String,
}

impl Check {
    /// Passes when `residual <= tolerance`.
    pub fn at_most(name: impl Into<String>, residual: f64, tolerance: f64, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            pass: residual <= tolerance,
            residual,
            tolerance,
            detail: detail.into(),
        }
    }
}

struct Row<'a> {
    columns: &'a [String],
    cells: &'a [Cell],
}

impl Serialize for Row<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.columns.len()))?;
        for (k, v) in self.columns.iter().zip(self.cells) {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub config: serde_json::Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(config: serde_json::Value, columns: &[&str]) -> Self {
        Report {
            config,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> std::io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }

    fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "# {}", serde_json::to_string(&self.config)?)?;
        let mut w = csv::Writer::from_writer(&mut out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(ToString::to_string))?;
        }
        w.flush()?;
        drop(w);
        for c in &self.checks {
            writeln!(out, "# check {}", serde_json::to_string(c)?)?;
        }
        Ok(())
    }

    fn write_json<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let rows: Vec<Row> = self
            .rows
            .iter()
            .map(|cells| Row {
                columns: &self.columns,
                cells,
            })
            .collect();
        let doc = serde_json::json!({
            "config": self.config,
            "rows": rows,
            "checks": self.checks,
        });
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new(serde_json::json!({"command": "test"}), &["p", "value", "note"]);
        r.push(vec![Cell::Real(f64::INFINITY), 1.5.into(), Cell::Empty]);
        r.push(vec![2.0.into(), 0.1.into(), "a,b".into()]);
        r.checks.push(Check::at_most("small", 1e-12, 1e-10, ""));
        r
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        sample().write(Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], r#"# {"command":"test"}"#);
        assert_eq!(lines[1], "p,value,note");
        assert_eq!(lines[2], "inf,1.5,");
        assert_eq!(lines[3], r#"2.0,0.1,"a,b""#);
        assert_eq!(Cell::Real(2.5e-16).to_string(), "2.5e-16");
        assert!(lines[4].starts_with("# check {\"name\":\"small\",\"pass\":true"));
    }

    #[test]
    fn json_layout() {
        let mut buf = Vec::new();
        sample().write(Format::Json, &mut buf).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"][0]["p"], "inf");
        assert_eq!(v["rows"][0]["note"], serde_json::Value::Null);
        assert_eq!(v["rows"][1]["value"], 0.1);
        assert_eq!(v["checks"][0]["pass"], true);
        assert_eq!(v["config"]["command"], "test");
    }
}
