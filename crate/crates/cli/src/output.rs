//! Tabular results rendered as CSV or JSON.

use serde_json::{Map, Value};

use crate::args::Format;
use crate::failure::{Failure, Outcome};

/// A single table cell; `Missing` renders as an empty CSV field and JSON `null`.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(usize),
    Real(f64),
    Text(String),
    Flag(bool),
    Missing,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Missing, Into::into)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    /// Non-finite reals become the strings `inf`, `-inf` and `NaN`.
    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Real(v) if v.is_finite() => Value::from(*v),
            Cell::Real(v) => Value::from(format!("{v:?}")),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Flag(b) => Value::from(*b),
            Cell::Missing => Value::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    /// Extra JSON fields emitted next to the rows.
    pub extra: Map<String, Value>,
    /// Rows whose values are not certified.
    pub uncertified: usize,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new(), extra: Map::new(), uncertified: 0 }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> Outcome<String> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                let fail = |e: csv::Error| Failure::input(e.to_string());
                w.write_record(&self.columns).map_err(fail)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv)).map_err(fail)?;
                }
                let bytes = w.into_inner().map_err(|e| Failure::input(e.to_string()))?;
                String::from_utf8(bytes).map_err(|e| Failure::input(e.to_string()))
            }
            Format::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| Value::Object(self.columns.iter().zip(row).map(|(c, v)| (c.to_string(), v.json())).collect()))
                    .collect();
                let mut doc = self.extra.clone();
                doc.insert("rows".into(), Value::Array(rows));
                let mut text = serde_json::to_string_pretty(&Value::Object(doc)).map_err(|e| Failure::input(e.to_string()))?;
                text.push('\n');
                Ok(text)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_and_json_agree() {
        let mut t = Table::new(&["N", "value", "note"]);
        t.push(vec![2.into(), 0.5.into(), Cell::Missing]);
        t.push(vec![3.into(), f64::INFINITY.into(), "a,b".into()]);
        assert_eq!(t.render(Format::Csv).unwrap(), "N,value,note\n2,0.5,\n3,inf,\"a,b\"\n");
        let doc: Value = serde_json::from_str(&t.render(Format::Json).unwrap()).unwrap();
        assert_eq!(doc["rows"][1]["value"], "inf");
        assert_eq!(doc["rows"][0]["note"], Value::Null);
    }
}
