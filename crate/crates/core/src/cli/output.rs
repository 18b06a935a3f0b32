//! Report rendering: pretty JSON with fixed 17-digit floats, and a plain
//! indented text form of the same document.

use std::fmt::Write as _;
use std::io;

use serde::Serialize;
use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::Value;

pub const SCHEMA: &str = "oblique-kit/1";

/// Pretty formatter that writes every float as `{:.16e}`.
struct SciFormatter(PrettyFormatter<'static>);

impl Formatter for SciFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        write!(w, "{value:.16e}")
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, f64::from(value))
    }

    fn begin_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + io::Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + io::Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

pub fn to_json(value: &impl Serialize) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter(PrettyFormatter::new()));
    value.serialize(&mut ser).expect("serializing a JSON value cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json writes UTF-8")
}

fn scalar(v: &Value) -> String {
    match v {
        Value::Null => "n/a".into(),
        Value::Bool(b) => if *b { "yes" } else { "no" }.into(),
        Value::Number(n) => match n.as_f64() {
            Some(f) if n.is_f64() => human(f),
            _ => n.to_string(),
        },
        Value::String(s) => s.clone(),
        _ => unreachable!("not a scalar"),
    }
}

/// Ten decimals with trailing zeros dropped in the usual range, scientific otherwise.
fn human(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if (1e-3..1e6).contains(&x.abs()) {
        let s = format!("{x:.10}");
        let s = s.trim_end_matches('0');
        s.strip_suffix('.').map_or_else(|| s.to_string(), |t| t.to_string())
    } else {
        format!("{x:.6e}")
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn inline(items: &[Value]) -> String {
    format!("[{}]", items.iter().map(scalar).collect::<Vec<_>>().join(", "))
}

fn render(out: &mut String, key: &str, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (k, v) in map {
                render(out, k, v, depth + 1);
            }
        }
        Value::Array(items) if items.iter().all(is_scalar) => {
            let _ = writeln!(out, "{pad}{key}: {}", inline(items));
        }
        Value::Array(items) if items.iter().all(|r| r.as_array().is_some_and(|r| r.iter().all(is_scalar))) => {
            let _ = writeln!(out, "{pad}{key}:");
            for row in items {
                let _ = writeln!(out, "{pad}  {}", inline(row.as_array().expect("checked")));
            }
        }
        Value::Array(items) => {
            let _ = writeln!(out, "{pad}{key}:");
            for (i, item) in items.iter().enumerate() {
                render(out, &format!("[{i}]"), item, depth + 1);
            }
        }
        other => {
            let _ = writeln!(out, "{pad}{key}: {}", scalar(other));
        }
    }
}

/// Indented `key: value` listing of a report object.
pub fn to_text(value: &Value) -> String {
    let mut out = String::new();
    match value {
        Value::Object(map) => {
            for (k, v) in map {
                render(&mut out, k, v, 0);
            }
        }
        other => render(&mut out, "report", other, 0),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn floats_have_seventeen_digits() {
        let s = to_json(&json!({"x": 3.0, "y": -0.1, "n": 8}));
        assert!(s.contains("\"x\": 3.0000000000000000e0"), "{s}");
        assert!(s.contains("\"y\": -1.0000000000000001e-1"), "{s}");
        assert!(s.contains("\"n\": 8"), "{s}");
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["y"].as_f64(), Some(-0.1));
    }

    #[test]
    fn text_lists_matrices_by_row() {
        let t = to_text(&json!({"m": [[1.0, 2.0], [3.0, 4.0]], "ok": true}));
        assert!(t.contains("m:\n  [1, 2]\n"), "{t}");
        assert!(t.contains("ok: yes"));
        assert_eq!(human(1.5e-12), "1.500000e-12");
        assert_eq!(human(-0.25), "-0.25");
    }
}
