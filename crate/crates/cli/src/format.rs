//! Locale-independent number formatting and table rendering.

use serde_json::{json, Value};

/// `%.12g`: twelve significant digits, trailing zeros removed, exponent form
/// outside `1e-4 ≤ |x| < 1e12`.
pub fn fmt_num(x: f64) -> String {
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
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{}e{sign}{:02}", trim_zeros(mantissa), exp.abs());
    }
    let fixed = format!("{:.*}", (11 - exp) as usize, x);
    trim_zeros(&fixed).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// `x` rounded to the digits that [`fmt_num`] prints.
pub fn round_num(x: f64) -> f64 {
    if x.is_finite() {
        fmt_num(x).parse().expect("formatted number parses")
    } else {
        x
    }
}

/// Rounds every float in a JSON tree to twelve significant digits.
pub fn round_json(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_num(n.as_f64().expect("f64 number"));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(round_json).collect()),
        Value::Object(map) => {
            Value::Object(map.into_iter().map(|(k, v)| (k, round_json(v))).collect())
        }
        other => other,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => fmt_num(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => {
                serde_json::Number::from_f64(round_num(*x)).map_or(Value::Null, Value::Number)
            }
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    /// Messages for the reader; on stderr for CSV, inline for JSON.
    pub notes: Vec<String>,
}

impl Table {
    pub fn new(columns: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::render).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::to_json).collect()))
            .collect();
        json!({ "columns": self.columns, "rows": rows, "notes": self.notes })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(fmt_num(-1.52), "-1.52");
        assert_eq!(fmt_num(1.0 / 3.0), "0.333333333333");
        assert_eq!(fmt_num(2.0 / 3.0 * 1e-7), "6.66666666667e-08");
        assert_eq!(fmt_num(123456789012345.0), "1.23456789012e+14");
        assert_eq!(fmt_num(999999999999.9), "1e+12");
        assert_eq!(fmt_num(0.0001), "0.0001");
        assert_eq!(fmt_num(-0.0), "0");
        assert_eq!(fmt_num(42.0), "42");
        assert_eq!(fmt_num(f64::NAN), "nan");
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec![Cell::Int(1), Cell::Num(0.5)]);
        assert_eq!(t.to_csv(), "a,b\n1,0.5\n");
    }

    #[test]
    fn json_numbers_are_rounded() {
        let v = round_json(json!({ "x": 0.1 + 0.2 }));
        assert_eq!(v.to_string(), r#"{"x":0.3}"#);
    }

    proptest::proptest! {
        #[test]
        fn formatted_numbers_round_trip(x in proptest::num::f64::NORMAL | proptest::num::f64::ZERO) {
            let text = fmt_num(x);
            let back: f64 = text.parse().unwrap();
            proptest::prop_assert!((back - x).abs() <= 5e-12 * x.abs(), "{x} -> {text}");
            proptest::prop_assert_eq!(fmt_num(back), text.clone());
            proptest::prop_assert!(text.bytes().all(|b| b.is_ascii_digit() || b"+-.e".contains(&b)));
        }
    }
}
