//! Deterministic CSV/JSON formatting.
//!
//! CSV cells use '.' decimals, no separators, and at most 12 significant
//! digits; identical inputs produce byte-identical files on every
//! platform.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Render a float with 12 significant digits, plain decimal notation in
/// the human range and scientific outside it.
pub fn fmt_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        let s = format!("{x:.decimals$}");
        let trimmed = s.trim_end_matches('0').trim_end_matches('.');
        trimmed.to_string()
    } else {
        format!("{x:.11e}")
    }
}

/// A column-ordered table destined for CSV or column-array JSON.
pub struct Table {
    headers: Vec<&'static str>,
    columns: Vec<Column>,
}

pub enum Column {
    Int(Vec<u64>),
    Float(Vec<f64>),
    Text(Vec<String>),
}

impl Table {
    pub fn new(headers: Vec<&'static str>, columns: Vec<Column>) -> Self {
        Table { headers, columns }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.headers.join(","));
        out.push('\n');
        let rows = self.len();
        for r in 0..rows {
            for (i, col) in self.columns.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                match col {
                    Column::Int(v) => {
                        let _ = write!(out, "{}", v[r]);
                    }
                    Column::Float(v) => out.push_str(&fmt_sig(v[r])),
                    Column::Text(v) => out.push_str(&v[r]),
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut map = serde_json::Map::new();
        for (h, col) in self.headers.iter().zip(&self.columns) {
            let value = match col {
                Column::Int(v) => serde_json::to_value(v),
                Column::Float(v) => serde_json::to_value(v),
                Column::Text(v) => serde_json::to_value(v),
            }
            .expect("column serialization cannot fail");
            map.insert((*h).to_string(), value);
        }
        let mut s = serde_json::to_string_pretty(&serde_json::Value::Object(map))
            .expect("table serialization cannot fail");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn len(&self) -> usize {
        self.columns
            .first()
            .map(|c| match c {
                Column::Int(v) => v.len(),
                Column::Float(v) => v.len(),
                Column::Text(v) => v.len(),
            })
            .unwrap_or(0)
    }
}

/// Serialize any record as pretty JSON with a trailing newline.
pub fn to_json_string<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("record serialization cannot fail");
    s.push('\n');
    s
}

/// Write rendered output to a file (path named in errors) or stdout.
pub fn emit(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, content).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(0.0), "0");
        assert_eq!(fmt_sig(2.5), "2.5");
        assert_eq!(fmt_sig(102.4970008252), "102.497000825");
        assert_eq!(fmt_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_sig(-1.0 / 7.0), "-0.142857142857");
        assert_eq!(fmt_sig(1e-7), "1.00000000000e-7");
        assert_eq!(fmt_sig(250.0), "250");
    }

    #[test]
    fn csv_rendering() {
        let t = Table::new(
            vec!["t", "probability", "source"],
            vec![
                Column::Int(vec![1, 2]),
                Column::Float(vec![0.5, 0.25]),
                Column::Text(vec!["mc".into(), "mc".into()]),
            ],
        );
        assert_eq!(t.to_csv(), "t,probability,source\n1,0.5,mc\n2,0.25,mc\n");
        let json: serde_json::Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(json["t"][1], 2);
        assert_eq!(json["probability"][0], 0.5);
    }
}
