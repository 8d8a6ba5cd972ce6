//! Deterministic JSON rendering: object keys in sorted order (serde_json's
//! default map) and every float printed with exactly 12 significant digits,
//! so identical inputs produce byte-identical output.

use serde_json::Value;

/// 12 significant digits in scientific notation; non-finite values become
/// null since JSON has no encoding for them.
pub fn format_f64(x: f64) -> String {
    if !x.is_finite() {
        return "null".to_string();
    }
    format!("{:.11e}", x)
}

fn write_value(out: &mut String, value: &Value) {
    match value {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                out.push_str(&i.to_string());
            } else if let Some(u) = n.as_u64() {
                out.push_str(&u.to_string());
            } else {
                out.push_str(&format_f64(n.as_f64().unwrap_or(f64::NAN)));
            }
        }
        Value::String(s) => {
            out.push_str(&serde_json::to_string(s).expect("string serialization"))
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                write_value(out, item);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&serde_json::to_string(key).expect("key serialization"));
                out.push(':');
                write_value(out, item);
            }
            out.push('}');
        }
    }
}

/// Renders a value on one line with the schema tag injected at the top level.
pub fn render(mut value: Value) -> String {
    if let Value::Object(map) = &mut value {
        map.insert("schema".to_string(), Value::String(SCHEMA.to_string()));
    }
    let mut out = String::new();
    write_value(&mut out, &value);
    out
}

pub const SCHEMA: &str = "sqdiff/1";
