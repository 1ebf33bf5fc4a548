use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::CliError;

pub const SIGNIFICANT_DIGITS: usize = 12;

pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x + 0.0;
    }
    let s = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x);
    s.parse::<f64>().map(|v| v + 0.0).unwrap_or(x)
}

/// Serializes `value` with every float rounded to 12 significant digits.
pub fn rounded_json<T: Serialize>(value: &T) -> Result<Value, CliError> {
    let v = serde_json::to_value(value).map_err(|e| CliError::Data(e.to_string()))?;
    Ok(round_value(v))
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => n
            .as_f64()
            .and_then(|x| serde_json::Number::from_f64(round_sig(x)))
            .map_or(Value::Null, Value::Number),
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(o) => Value::Object(
            o.into_iter()
                .map(|(k, v)| (k, round_value(v)))
                .collect::<Map<_, _>>(),
        ),
        other => other,
    }
}

pub fn json_text(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        other => other.to_string(),
    }
}

/// `key,value` rows for every leaf, keys joined with `.`.
pub fn flat_csv(v: &Value) -> String {
    let mut rows = Vec::new();
    flatten("", v, &mut rows);
    let mut out = String::from("key,value\n");
    for (k, val) in rows {
        let _ = writeln!(out, "{},{}", csv_field(&k), csv_field(&val));
    }
    out
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    let join = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(o) => {
            for (k, val) in o {
                flatten(&join(k), val, rows);
            }
        }
        Value::Array(a) => {
            for (i, val) in a.iter().enumerate() {
                flatten(&join(&i.to_string()), val, rows);
            }
        }
        leaf => rows.push((prefix.to_string(), scalar(leaf))),
    }
}

/// Rows of objects sharing `columns`, in column order.
pub fn table_csv(columns: &[&str], rows: &[Value]) -> String {
    let mut out = columns.join(",");
    out.push('\n');
    for row in rows {
        let cells: Vec<String> = columns
            .iter()
            .map(|c| csv_field(&scalar(&row[*c])))
            .collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}
