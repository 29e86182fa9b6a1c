//! Tables and their CSV and JSON encodings.

use std::io::Write;

use serde_json::{Map, Number, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Null,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
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
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Null, Into::into)
    }
}

/// 17 significant digits, enough to round-trip any `f64`.
pub fn format_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn csv_escape(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_f64(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(s) => csv_escape(s),
            Cell::Null => String::new(),
        }
    }

    /// Metadata lines are not CSV fields, so text is written verbatim
    /// with line breaks flattened.
    fn meta(&self) -> String {
        match self {
            Cell::Text(s) => s.replace(['\n', '\r'], " "),
            other => other.csv(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Null => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    /// Inserted before the file extension when several tables share one output path.
    pub tag: Option<String>,
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table { columns: columns.iter().map(|c| c.to_string()).collect(), ..Default::default() }
    }

    pub fn meta(&mut self, key: &str, v: impl Into<Cell>) -> &mut Self {
        self.meta.push((key.to_string(), v.into()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(w, "# {k}={}", v.meta())?;
        }
        writeln!(w, "{}", self.columns.iter().map(|c| csv_escape(c)).collect::<Vec<_>>().join(","))?;
        for row in &self.rows {
            writeln!(w, "{}", row.iter().map(Cell::csv).collect::<Vec<_>>().join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::json)).collect()))
            .collect();
        let mut top = Map::new();
        top.insert("meta".into(), Value::Object(meta));
        top.insert("rows".into(), Value::Array(rows));
        Value::Object(top)
    }

    pub fn write_json(&self, w: &mut impl Write) -> std::io::Result<()> {
        serde_json::to_writer_pretty(&mut *w, &self.to_json())?;
        writeln!(w)
    }
}
