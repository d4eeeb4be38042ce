use anyhow::Result;
use serde_json::Value;

use crate::config::Format;

/// A verb's result: structured data plus a human-readable rendering.
pub struct Report {
    pub data: Value,
    pub text: String,
}

impl Report {
    pub fn new(data: Value, text: impl Into<String>) -> Report {
        Report { data, text: text.into() }
    }
}

pub fn render(r: &Report, format: Format) -> Result<String> {
    match format {
        Format::Json => Ok(serde_json::to_string_pretty(&r.data)? + "\n"),
        Format::Text => Ok(if r.text.ends_with('\n') { r.text.clone() } else { format!("{}\n", r.text) }),
        Format::Csv => csv_of(&r.data),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        Value::Bool(_) | Value::Number(_) => v.to_string(),
        _ => v.to_string(),
    }
}

/// An object with a `rows` array of objects becomes one record per row;
/// any other object becomes a single record of its top-level fields.
fn csv_of(data: &Value) -> Result<String> {
    let single;
    let rows: Vec<&serde_json::Map<String, Value>> = match data.get("rows").and_then(Value::as_array) {
        Some(rows) => rows.iter().filter_map(Value::as_object).collect(),
        None => match data.as_object() {
            Some(o) => vec![o],
            None => {
                single = serde_json::Map::from_iter([("value".to_string(), data.clone())]);
                vec![&single]
            }
        },
    };
    let mut header: Vec<&String> = Vec::new();
    for r in &rows {
        for k in r.keys() {
            if !header.contains(&k) {
                header.push(k);
            }
        }
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&header)?;
    for r in &rows {
        w.write_record(header.iter().map(|k| r.get(*k).map(cell).unwrap_or_default()))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}
