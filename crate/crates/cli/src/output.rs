use std::fmt::Write as _;

use serde_json::Value;

pub fn json(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// One header line and one record line. Arrays of scalars are joined with
/// `;`, nested objects are embedded as quoted JSON.
pub fn record_csv(v: &Value) -> String {
    let Value::Object(map) = v else {
        return format!("{}\n", cell(v));
    };
    let header: Vec<&str> = map.keys().map(String::as_str).collect();
    let values: Vec<String> = map.values().map(cell).collect();
    format!("{}\n{}\n", header.join(","), values.join(","))
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::Null => Some(String::new()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Number(n) => Some(n.to_string()),
        Value::String(s) => Some(s.clone()),
        _ => None,
    }
}

fn cell(v: &Value) -> String {
    if let Some(s) = scalar(v) {
        return quote(&s);
    }
    if let Value::Array(items) = v {
        if let Some(parts) = items.iter().map(scalar).collect::<Option<Vec<_>>>() {
            return quote(&parts.join(";"));
        }
    }
    quote(&serde_json::to_string(v).expect("serializable"))
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Matrix rows as CSV; unreachable entries are empty.
pub fn matrix_csv(rows: &[Vec<Option<usize>>]) -> String {
    let mut out = String::new();
    for r in rows {
        let cells: Vec<String> = r.iter().map(|x| x.map(|d| d.to_string()).unwrap_or_default()).collect();
        writeln!(out, "{}", cells.join(",")).unwrap();
    }
    out
}
