//! Uniform tabular output as CSV or JSON.

use std::io::Write;

use corisk::fmt::{round_sig, sig};
use serde_json::{Map, Number, Value};

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Str(String),
    Empty,
}

impl Cell {
    pub fn opt(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }

    fn text(&self, digits: usize) -> String {
        match self {
            Cell::Num(x) => sig(*x, digits),
            Cell::Int(i) => i.to_string(),
            Cell::Str(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self, digits: usize) -> Value {
        match self {
            Cell::Num(x) => Number::from_f64(round_sig(*x, digits))
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(sig(*x, digits))),
            Cell::Int(i) => Value::from(*i),
            Cell::Str(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, out: W, digits: usize) -> csv::Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| c.text(digits)))?;
        }
        w.flush()?;
        Ok(())
    }

    /// An array of objects keyed by column name; non-finite numbers become strings.
    pub fn write_json<W: Write>(&self, mut out: W, digits: usize) -> std::io::Result<()> {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let obj: Map<String, Value> = self
                    .columns
                    .iter()
                    .cloned()
                    .zip(row.iter().map(|c| c.json(digits)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        serde_json::to_writer_pretty(&mut out, &rows)?;
        writeln!(out)
    }
}
