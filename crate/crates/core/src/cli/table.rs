//! Tabular output with a metadata header.

use std::io::Write;

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::Result;

/// Significant digits of every emitted number.
pub const SIG_DIGITS: usize = 12;

/// Formats `x` with [`SIG_DIGITS`] significant digits, `%g` style: plain
/// notation for exponents in [−5, 12), scientific otherwise, trailing
/// zeros removed.
pub fn format_sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent marker");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa), exp)
    }
}

fn trim_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

/// `x` rounded to [`SIG_DIGITS`] significant digits, for JSON output.
pub fn round_sig(x: f64) -> f64 {
    if x.is_finite() {
        format!("{:.*e}", SIG_DIGITS - 1, x).parse().unwrap_or(x)
    } else {
        x
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
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

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_sig(*x),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(round_sig(*x)),
            Cell::Num(x) => json!(format_sig(*x)),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct ResultTable {
    pub columns: Vec<(String, String)>,
    pub rows: Vec<Vec<Cell>>,
    /// Ordered `key: value` metadata; values are JSON.
    pub meta: Vec<(String, Value)>,
}

impl ResultTable {
    /// Columns given as `(name, unit)`.
    pub fn new(columns: &[(&str, &str)]) -> Self {
        ResultTable {
            columns: columns.iter().map(|(n, u)| (n.to_string(), u.to_string())).collect(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: Value) {
        self.meta.push((key.to_string(), value));
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|(n, _)| n == name)
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> Result<()> {
        for (k, v) in &self.meta {
            let text = match v {
                Value::String(s) => s.clone(),
                other => serde_json::to_string(other)?,
            };
            writeln!(out, "# {k}: {text}")?;
        }
        let units: Vec<String> = self.columns.iter().map(|(n, u)| format!("{n} [{u}]")).collect();
        writeln!(out, "# units: {}", units.join(", "))?;
        let names: Vec<&str> = self.columns.iter().map(|(n, _)| n.as_str()).collect();
        writeln!(out, "{}", names.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let meta: serde_json::Map<String, Value> = self.meta.iter().cloned().collect();
        json!({
            "meta": meta,
            "columns": self.columns.iter().map(|(n, _)| n).collect::<Vec<_>>(),
            "units": self.columns.iter().map(|(_, u)| u).collect::<Vec<_>>(),
            "rows": self.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }

    pub fn write_json(&self, out: &mut dyn Write) -> Result<()> {
        serde_json::to_writer_pretty(&mut *out, &self.to_json())?;
        writeln!(out)?;
        Ok(())
    }
}
