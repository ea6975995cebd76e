//! Typed tables and their CSV / JSON serializations.
//!
//! Floats are written with 17 significant digits (`{:.16e}`), which is
//! enough for `parse(emit(t)) == t` bit for bit. Cell types are recovered
//! from the text: a float always carries an exponent, an integer never
//! does, and an empty cell is `Null`.

use std::fmt;
use std::str::FromStr;

use serde_json::{Map, Number, Value as Json};

use crate::error::CliError;

#[derive(Debug, Clone)]
pub enum Value {
    Null,
    Int(i64),
    Float(f64),
    Text(String),
}

impl PartialEq for Value {
    /// Floats compare by bit pattern so that NaN round-trips count as equal.
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Value::Null, Value::Null) => true,
            (Value::Int(a), Value::Int(b)) => a == b,
            (Value::Float(a), Value::Float(b)) => a.to_bits() == b.to_bits(),
            (Value::Text(a), Value::Text(b)) => a == b,
            _ => false,
        }
    }
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Float(v)
    }
}

impl From<i64> for Value {
    fn from(v: i64) -> Self {
        Value::Int(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_string())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl From<Option<f64>> for Value {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Value::Null, Value::Float)
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Null => Ok(()),
            Value::Int(v) => write!(f, "{}", v),
            Value::Float(v) => write!(f, "{}", format_float(*v)),
            Value::Text(s) => f.write_str(s),
        }
    }
}

impl Value {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Float(v) => Some(*v),
            Value::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    pub fn as_i64(&self) -> Option<i64> {
        match self {
            Value::Int(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }

    /// Recovers a cell from its serialized text.
    fn parse_cell(s: &str) -> Value {
        if s.is_empty() {
            return Value::Null;
        }
        if let Some(v) = parse_special_float(s) {
            return Value::Float(v);
        }
        let numeric = s.bytes().all(|b| b.is_ascii_digit() || b"+-.eE".contains(&b));
        if numeric && s.bytes().any(|b| b.is_ascii_digit()) {
            if s.contains(['e', 'E', '.']) {
                if let Ok(v) = s.parse::<f64>() {
                    return Value::Float(v);
                }
            } else if let Ok(v) = s.parse::<i64>() {
                return Value::Int(v);
            }
        }
        Value::Text(s.to_string())
    }

    fn to_json(&self) -> Json {
        match self {
            Value::Null => Json::Null,
            Value::Int(v) => Json::from(*v),
            Value::Float(v) if v.is_finite() => {
                Json::Number(Number::from_str(&format_float(*v)).expect("formatted float is valid JSON"))
            }
            // JSON has no non-finite numbers; they travel as strings.
            Value::Float(v) => Json::String(format_float(*v)),
            Value::Text(s) => Json::String(s.clone()),
        }
    }

    fn from_json(j: &Json) -> Result<Value, CliError> {
        Ok(match j {
            Json::Null => Value::Null,
            Json::Number(n) => Value::parse_cell(n.as_str()),
            Json::String(s) => match parse_special_float(s) {
                Some(v) => Value::Float(v),
                None => Value::Text(s.clone()),
            },
            other => return Err(CliError::Parse(format!("unexpected JSON cell {}", other))),
        })
    }
}

/// 17 significant digits in scientific notation.
pub fn format_float(v: f64) -> String {
    format!("{:.16e}", v)
}

fn parse_special_float(s: &str) -> Option<f64> {
    match s {
        "NaN" => Some(f64::NAN),
        "inf" => Some(f64::INFINITY),
        "-inf" => Some(f64::NEG_INFINITY),
        _ => None,
    }
}

/// One rectangular table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Table { name: name.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    /// Appends a row; panics on a width mismatch, which is a programming
    /// error in the command that builds the table.
    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cells of one column, in row order.
    pub fn column_values(&self, name: &str) -> Option<Vec<&Value>> {
        let i = self.column(name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

/// A table together with run metadata and an optional summary.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub meta: Vec<(String, Value)>,
    pub summary: Vec<(String, Value)>,
    pub table: Table,
}

/// CSV with a mandatory header row and LF line endings.
pub fn emit_csv(table: &Table) -> Result<String, CliError> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    String::from_utf8(bytes).map_err(|e| CliError::Parse(e.to_string()))
}

/// Inverse of [`emit_csv`]. CSV carries no table name, so it is supplied.
pub fn parse_csv(name: &str, text: &str) -> Result<Table, CliError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
    let columns: Vec<String> = r.headers()?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(rec.iter().map(Value::parse_cell).collect());
    }
    Ok(Table { name: name.into(), columns, rows })
}

fn pairs_to_json(pairs: &[(String, Value)]) -> Json {
    let mut m = Map::new();
    for (k, v) in pairs {
        m.insert(k.clone(), v.to_json());
    }
    Json::Object(m)
}

fn pairs_from_json(j: Option<&Json>) -> Result<Vec<(String, Value)>, CliError> {
    match j {
        None | Some(Json::Null) => Ok(Vec::new()),
        Some(Json::Object(m)) => m.iter().map(|(k, v)| Ok((k.clone(), Value::from_json(v)?))).collect(),
        Some(other) => Err(CliError::Parse(format!("expected an object, found {}", other))),
    }
}

/// `{"meta": {...}, "summary": {...}, "data": {"name", "columns", "rows"}}`.
pub fn emit_json(doc: &Document) -> Result<String, CliError> {
    let mut data = Map::new();
    data.insert("name".into(), Json::String(doc.table.name.clone()));
    data.insert("columns".into(), Json::Array(doc.table.columns.iter().cloned().map(Json::String).collect()));
    data.insert(
        "rows".into(),
        Json::Array(doc.table.rows.iter().map(|r| Json::Array(r.iter().map(Value::to_json).collect())).collect()),
    );
    let mut top = Map::new();
    top.insert("meta".into(), pairs_to_json(&doc.meta));
    top.insert("summary".into(), pairs_to_json(&doc.summary));
    top.insert("data".into(), Json::Object(data));
    let mut s = serde_json::to_string_pretty(&Json::Object(top))?;
    s.push('\n');
    Ok(s)
}

pub fn parse_json(text: &str) -> Result<Document, CliError> {
    let top: Json = serde_json::from_str(text)?;
    let data = top.get("data").ok_or_else(|| CliError::Parse("missing \"data\"".into()))?;
    let name = data.get("name").and_then(Json::as_str).unwrap_or_default().to_string();
    let columns = data
        .get("columns")
        .and_then(Json::as_array)
        .ok_or_else(|| CliError::Parse("missing \"columns\"".into()))?
        .iter()
        .map(|c| c.as_str().map(String::from).ok_or_else(|| CliError::Parse("column name is not a string".into())))
        .collect::<Result<Vec<_>, _>>()?;
    let mut rows = Vec::new();
    for row in data.get("rows").and_then(Json::as_array).ok_or_else(|| CliError::Parse("missing \"rows\"".into()))? {
        let cells = row.as_array().ok_or_else(|| CliError::Parse("row is not an array".into()))?;
        rows.push(cells.iter().map(Value::from_json).collect::<Result<Vec<_>, _>>()?);
    }
    Ok(Document {
        meta: pairs_from_json(top.get("meta"))?,
        summary: pairs_from_json(top.get("summary"))?,
        table: Table { name, columns, rows },
    })
}
