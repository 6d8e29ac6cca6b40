//! Tables rendered as CSV or JSON.
//!
//! Numbers go out with 17 significant digits and infinities as `inf`, in both
//! formats, so CSV output is byte-stable for a fixed configuration.

use std::io::Write;

use clap::ValueEnum;
use renyi_core::io::format_value;
use serde_json::{Map, Value};

use crate::error::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_value(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => {
                // same digits as the CSV rendering
                let v: f64 = format_value(*x).parse().expect("formatted float parses");
                serde_json::Number::from_f64(v).map_or(Value::Null, Value::Number)
            }
            Cell::Num(x) => Value::String(format_value(*x)),
            Cell::Int(n) => Value::from(*n),
            Cell::Bool(b) => Value::Bool(*b),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

/// A header, rows, and an optional key/value summary.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn summarize(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_string(), value.into()));
    }

    /// CSV with the header first; the summary follows as `# key,value`
    /// comment lines.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().flexible(true).from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv))?;
        }
        for (k, v) in &self.summary {
            w.write_record([format!("# {k}"), v.csv()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// An array of row objects, or `{"rows": [...], "summary": {...}}` when
    /// there is a summary.
    pub fn write_json<W: Write>(&self, mut out: W) -> Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (h, c) in self.header.iter().zip(row) {
                    m.insert(h.clone(), c.json());
                }
                Value::Object(m)
            })
            .collect();
        let doc = if self.summary.is_empty() {
            Value::Array(rows)
        } else {
            let mut s = Map::new();
            for (k, v) in &self.summary {
                s.insert(k.clone(), v.json());
            }
            let mut m = Map::new();
            m.insert("rows".into(), Value::Array(rows));
            m.insert("summary".into(), Value::Object(s));
            Value::Object(m)
        };
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)?;
        Ok(())
    }

    pub fn write<W: Write>(&self, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Json => self.write_json(out),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_renders_inf_and_empty() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Num(f64::INFINITY), Cell::Empty]);
        t.push(vec![Cell::Num(0.5), Cell::Bool(true)]);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\ninf,\n5.0000000000000000e-1,true\n");
    }

    #[test]
    fn json_with_summary() {
        let mut t = Table::new(&["n"]);
        t.push(vec![Cell::Int(1)]);
        t.summarize("value", f64::INFINITY);
        let mut buf = Vec::new();
        t.write_json(&mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["summary"]["value"], "inf");
        assert_eq!(v["rows"][0]["n"], 1);
    }
}
