//! Report values and their JSON, human and CSV renderings.

use std::str::FromStr;

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

/// Significant digits in JSON and CSV output; enough to round-trip an `f64`.
pub const STRUCTURED_DIGITS: usize = 17;
/// Significant digits in human-readable output.
pub const HUMAN_DIGITS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Human,
    Csv,
}

/// A report value; numbers are formatted only when rendered.
#[derive(Debug, Clone, PartialEq)]
pub enum Val {
    Null,
    Bool(bool),
    Int(i128),
    Num(f64),
    Str(String),
    List(Vec<Val>),
    Obj(Vec<(String, Val)>),
}

impl From<f64> for Val {
    fn from(v: f64) -> Self {
        Val::Num(v)
    }
}
impl From<usize> for Val {
    fn from(v: usize) -> Self {
        Val::Int(v as i128)
    }
}
impl From<u64> for Val {
    fn from(v: u64) -> Self {
        Val::Int(v as i128)
    }
}
impl From<bool> for Val {
    fn from(v: bool) -> Self {
        Val::Bool(v)
    }
}
impl From<&str> for Val {
    fn from(v: &str) -> Self {
        Val::Str(v.to_string())
    }
}
impl From<String> for Val {
    fn from(v: String) -> Self {
        Val::Str(v)
    }
}
impl<T: Into<Val>> From<Option<T>> for Val {
    fn from(v: Option<T>) -> Self {
        v.map_or(Val::Null, Into::into)
    }
}

/// Builds an object from `(key, value)` pairs, keeping their order.
#[macro_export]
macro_rules! obj {
    ($($key:expr => $value:expr),* $(,)?) => {
        $crate::output::Val::Obj(vec![$(($key.to_string(), $crate::output::Val::from($value))),*])
    };
}

/// Formats like C's `%.{digits}g`: fixed notation for decimal exponents in
/// `[-5, digits)`, scientific otherwise, trailing zeros removed.
/// Non-finite values become `inf`, `-inf` or `nan`.
pub fn format_g(v: f64, digits: usize) -> String {
    if v.is_nan() {
        return "nan".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -5 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{mantissa}e{sign}{:02}", exp.abs());
    }
    let decimals = (digits as i32 - 1 - exp).max(0) as usize;
    trim_zeros(&format!("{:.*}", decimals, v)).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

impl Val {
    /// JSON value with numbers at [`STRUCTURED_DIGITS`]. Non-finite numbers
    /// become the strings `"inf"`, `"-inf"` and `"nan"`.
    pub fn to_json(&self) -> Value {
        match self {
            Val::Null => Value::Null,
            Val::Bool(b) => Value::Bool(*b),
            Val::Int(i) => Value::Number(Number::from_str(&i.to_string()).expect("integer literal")),
            Val::Num(x) if x.is_finite() => {
                Value::Number(Number::from_str(&format_g(*x, STRUCTURED_DIGITS)).expect("formatted number is valid JSON"))
            }
            Val::Num(x) => Value::String(format_g(*x, STRUCTURED_DIGITS)),
            Val::Str(s) => Value::String(s.clone()),
            Val::List(items) => Value::Array(items.iter().map(Val::to_json).collect()),
            Val::Obj(fields) => {
                let mut map = Map::new();
                for (k, v) in fields {
                    map.insert(k.clone(), v.to_json());
                }
                Value::Object(map)
            }
        }
    }

    /// Scalar text for table cells: empty for null.
    pub fn cell(&self, digits: usize) -> String {
        match self {
            Val::Null => String::new(),
            Val::Bool(b) => b.to_string(),
            Val::Int(i) => i.to_string(),
            Val::Num(x) => format_g(*x, digits),
            Val::Str(s) => s.clone(),
            Val::List(_) | Val::Obj(_) => self.to_json().to_string(),
        }
    }

    /// Flattens nested objects into dotted keys.
    fn flatten_into(&self, prefix: &str, out: &mut Vec<(String, Val)>) {
        match self {
            Val::Obj(fields) => {
                for (k, v) in fields {
                    let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                    v.flatten_into(&key, out);
                }
            }
            other => out.push((prefix.to_string(), other.clone())),
        }
    }

    pub fn flatten(&self) -> Vec<(String, Val)> {
        let mut out = Vec::new();
        self.flatten_into("", &mut out);
        out
    }
}

/// Rows with a fixed header, used for CSV and for aligned human tables.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Val>>,
}

/// Everything a command prints. Rendering happens only after the command
/// has succeeded, so error paths never emit partial output.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub config: Val,
    pub result: Val,
    pub checks: Option<Vec<Val>>,
    /// Tabular view for CSV and human output; defaults to the flattened result.
    pub table: Option<Table>,
}

impl Report {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => self.render_json(),
            Format::Csv => self.render_csv(),
            Format::Human => self.render_human(),
        }
    }

    fn render_json(&self) -> String {
        let doc = Val::Obj(vec![
            ("config".into(), self.config.clone()),
            ("result".into(), self.result.clone()),
            ("checks".into(), self.checks.clone().map_or(Val::Null, Val::List)),
        ]);
        let mut s = serde_json::to_string_pretty(&doc.to_json()).expect("JSON values serialize");
        s.push('\n');
        s
    }

    fn default_table(&self) -> Table {
        let flat = self.result.flatten();
        Table {
            header: flat.iter().map(|(k, _)| k.clone()).collect(),
            rows: vec![flat.into_iter().map(|(_, v)| v).collect()],
        }
    }

    fn render_csv(&self) -> String {
        let table = self.table.clone().unwrap_or_else(|| self.default_table());
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&table.header).expect("in-memory write");
        for row in &table.rows {
            w.write_record(row.iter().map(|v| v.cell(STRUCTURED_DIGITS))).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("UTF-8 cells")
    }

    fn render_human(&self) -> String {
        let mut out = String::new();
        // Reports with checks list them line by line instead of as a table.
        match self.table.as_ref().filter(|_| self.checks.is_none()) {
            Some(table) => {
                let cells: Vec<Vec<String>> =
                    table.rows.iter().map(|r| r.iter().map(|v| v.cell(HUMAN_DIGITS)).collect()).collect();
                let widths: Vec<usize> = (0..table.header.len())
                    .map(|i| cells.iter().map(|r| r[i].len()).chain([table.header[i].len()]).max().unwrap_or(0))
                    .collect();
                let line = |items: Vec<&str>| -> String {
                    let padded: Vec<String> =
                        items.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}", w = *w)).collect();
                    padded.join("  ").trim_end().to_string() + "\n"
                };
                out += &line(table.header.iter().map(String::as_str).collect());
                for row in &cells {
                    out += &line(row.iter().map(String::as_str).collect());
                }
            }
            None => {
                let flat = self.result.flatten();
                let width = flat.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
                for (k, v) in flat {
                    let text = if v == Val::Null { "-".to_string() } else { v.cell(HUMAN_DIGITS) };
                    out += &format!("{k:<width$}  {text}\n");
                }
            }
        }
        for check in self.checks.iter().flatten() {
            out += &human_check_line(check);
        }
        out
    }
}

/// `PASS group/name  value=… reference=… …` from a check object.
pub fn human_check_line(check: &Val) -> String {
    let flat = check.flatten();
    let get = |key: &str| flat.iter().find(|(k, _)| k == key).map(|(_, v)| v.clone()).unwrap_or(Val::Null);
    let status = if get("passed") == Val::Bool(true) { "PASS" } else { "FAIL" };
    let mut line = format!("{status} {}/{}", get("group").cell(0), get("name").cell(0));
    for (k, v) in &flat {
        if matches!(k.as_str(), "passed" | "group" | "name") || *v == Val::Null {
            continue;
        }
        line += &format!("  {k}={}", v.cell(HUMAN_DIGITS));
    }
    line + "\n"
}
