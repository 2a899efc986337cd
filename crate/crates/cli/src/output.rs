use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

/// Single-line JSON in field order with every non-integer number as `{:.16e}`.
pub fn canonical_json<T: Serialize>(value: &T) -> String {
    let v = serde_json::to_value(value).expect("serializable");
    let mut out = String::new();
    emit(&v, &mut out);
    out
}

fn emit(v: &Value, out: &mut String) {
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => {
            if n.is_f64() {
                write!(out, "{:.16e}", n.as_f64().expect("f64")).expect("write to string");
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                emit(item, out);
            }
            out.push(']');
        }
        Value::Object(map) => {
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                if i > 0 {
                    out.push(',');
                }
                out.push_str(&Value::String(key.clone()).to_string());
                out.push(':');
                emit(item, out);
            }
            out.push('}');
        }
    }
}

/// Writes to `path`, or stdout when `path` is `None` or `-`.
pub fn write_out(path: Option<&Path>, text: &str) -> io::Result<()> {
    match path {
        Some(p) if p != Path::new("-") => fs::write(p, text),
        _ => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_are_fixed_width() {
        let v = serde_json::json!({"b": 0.5, "a": [1, 2.0], "c": null});
        assert_eq!(canonical_json(&v), r#"{"b":5.0000000000000000e-1,"a":[1,2.0000000000000000e0],"c":null}"#);
    }
}
