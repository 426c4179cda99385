//! Tables written as CSV or JSON. Floats in CSV carry 12 significant digits.

use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
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

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// `%.12g` without the C library: trailing zeros trimmed, exponent form
/// outside `1e-4 <= |x| < 1e12`.
pub fn fmt_g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mant, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..12).contains(&exp) {
        let decimals = (11 - exp) as usize;
        trim(&format!("{x:.decimals$}")).to_string()
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mant), exp.abs())
    }
}

fn trim(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<&'static str>) -> Self {
        Table { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert!(row.len() == self.header.len() || row.len() == 1);
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => self.json(),
        }
    }

    fn csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(csv_cell).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    fn json(&self) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                if row.len() == 1 && self.header.len() > 1 {
                    return json_cell(&row[0]);
                }
                let obj: Map<String, Value> = self
                    .header
                    .iter()
                    .zip(row)
                    .map(|(h, c)| (h.to_string(), json_cell(c)))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut s = serde_json::to_string_pretty(&rows).expect("serializable");
        s.push('\n');
        s
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Num(v) => fmt_g12(*v),
        Cell::Int(v) => v.to_string(),
        Cell::Text(s) => s.clone(),
        Cell::Bool(b) => b.to_string(),
    }
}

pub fn json_cell(c: &Cell) -> Value {
    match c {
        // non-finite values have no JSON number; keep the CSV spelling
        Cell::Num(v) if !v.is_finite() => Value::String(fmt_g12(*v)),
        Cell::Num(v) => Value::from(*v),
        Cell::Int(v) => Value::from(*v),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Bool(b) => Value::Bool(*b),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_g12(0.5 * 2f64.ln()), "0.34657359028");
        assert_eq!(fmt_g12(3.0), "3");
        assert_eq!(fmt_g12(-0.173_286_795_139_986_3), "-0.17328679514");
        assert_eq!(fmt_g12(1e-7), "1e-07");
        assert_eq!(fmt_g12(1.25e15), "1.25e+15");
        assert_eq!(fmt_g12(123_456_789_012.4), "123456789012");
        assert_eq!(fmt_g12(0.000_012_5), "1.25e-05");
        assert_eq!(fmt_g12(0.000_125), "0.000125");
        assert_eq!(fmt_g12(9.999_999_999_999_9), "10");
        assert_eq!(fmt_g12(f64::INFINITY), "inf");
    }

    #[test]
    fn csv_and_json() {
        let mut t = Table::new(vec!["a", "b"]);
        t.push(vec![1.5.into(), "x".into()]);
        assert_eq!(t.render(Format::Csv), "a,b\n1.5,x\n");
        let v: Value = serde_json::from_str(&t.render(Format::Json)).unwrap();
        assert_eq!(v[0]["a"], 1.5);
        assert_eq!(v[0]["b"], "x");
    }
}
