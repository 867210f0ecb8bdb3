//! Column-typed tables written as CSV or JSON with a fixed float format.

use std::io::Write;

use nhbloch::format::float17;
use serde::Serialize;

use crate::config::Format;
use crate::error::Result;

#[derive(Debug, Clone)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::F(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::I(x as i64)
    }
}

impl From<i32> for Cell {
    fn from(x: i32) -> Self {
        Cell::I(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::S(s.to_string())
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::F(x) => float17(*x),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => s.clone(),
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::F(x) if x.is_finite() => float17(*x),
            Cell::F(_) => "null".to_string(),
            Cell::I(i) => i.to_string(),
            Cell::S(s) => serde_json::to_string(s).expect("string serializes"),
        }
    }
}

/// Column name plus a one-line description for manifests.
#[derive(Debug, Clone, Serialize)]
pub struct Column {
    pub name: &'static str,
    pub description: &'static str,
}

pub const fn col(name: &'static str, description: &'static str) -> Column {
    Column { name, description }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<Column>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, mut w: W, format: Format) -> Result<()> {
        match format {
            Format::Csv => {
                let header: Vec<&str> = self.columns.iter().map(|c| c.name).collect();
                writeln!(w, "{}", header.join(","))?;
                for row in &self.rows {
                    let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(w, "{}", cells.join(","))?;
                }
            }
            Format::Json => {
                let names: Vec<String> = self
                    .columns
                    .iter()
                    .map(|c| serde_json::to_string(c.name).expect("string serializes"))
                    .collect();
                writeln!(w, "{{\"columns\":[{}],\"rows\":[", names.join(","))?;
                for (i, row) in self.rows.iter().enumerate() {
                    let cells: Vec<String> = row.iter().map(Cell::json).collect();
                    let sep = if i + 1 < self.rows.len() { "," } else { "" };
                    writeln!(w, "[{}]{sep}", cells.join(","))?;
                }
                writeln!(w, "]}}")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(vec![col("k", "momentum"), col("band", "index")]);
        t.push(vec![0.1.into(), 1usize.into()]);
        t.push(vec![f64::NAN.into(), 2usize.into()]);
        t
    }

    #[test]
    fn csv_layout() {
        let mut buf = Vec::new();
        sample().write(&mut buf, Format::Csv).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text, "k,band\n1.0000000000000001e-1,1\nNaN,2\n");
    }

    #[test]
    fn json_is_valid_and_round_trips() {
        let mut buf = Vec::new();
        sample().write(&mut buf, Format::Json).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["columns"][1], "band");
        assert_eq!(v["rows"][0][0].as_f64(), Some(0.1));
        assert!(v["rows"][1][0].is_null());
    }
}
