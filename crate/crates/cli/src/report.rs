//! Run reports with byte-stable serialization and baseline comparison.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::CliError;

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub command: String,
    pub parameters: Value,
    pub seed: u64,
    /// Seconds since the Unix epoch; only recorded with `--stamp`.
    pub timestamp: Option<u64>,
    pub results: Value,
    pub verdicts: BTreeMap<String, bool>,
    pub pass: bool,
}

/// Canonical JSON: sorted keys, two-space indent, floats with 17 significant digits.
pub fn to_canonical(v: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, v, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.push_str(&"  ".repeat(d));
    match v {
        Value::Null => out.push_str("null"),
        Value::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
        Value::Number(n) => {
            if n.is_f64() {
                out.push_str(&format_float(n.as_f64().unwrap_or(f64::NAN)));
            } else {
                out.push_str(&n.to_string());
            }
        }
        Value::String(s) => out.push_str(&Value::String(s.clone()).to_string()),
        Value::Array(items) => {
            if items.is_empty() {
                out.push_str("[]");
                return;
            }
            if items.iter().all(|x| !x.is_array() && !x.is_object()) {
                out.push('[');
                for (k, x) in items.iter().enumerate() {
                    if k > 0 {
                        out.push_str(", ");
                    }
                    write_value(out, x, depth);
                }
                out.push(']');
                return;
            }
            out.push_str("[\n");
            for (k, x) in items.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, x, depth + 1);
                out.push_str(if k + 1 < items.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(map) => {
            if map.is_empty() {
                out.push_str("{}");
                return;
            }
            let sorted: BTreeMap<&String, &Value> = map.iter().collect();
            out.push_str("{\n");
            for (k, (key, x)) in sorted.iter().enumerate() {
                pad(out, depth + 1);
                let _ = write!(out, "{}: ", Value::String((*key).clone()));
                write_value(out, x, depth + 1);
                out.push_str(if k + 1 < sorted.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

pub fn format_float(x: f64) -> String {
    if !x.is_finite() {
        return "null".into();
    }
    format!("{x:.16e}")
}

#[derive(Clone, Debug, Serialize)]
pub struct Drift {
    pub path: String,
    pub baseline: Value,
    pub current: Value,
}

/// Compares `results` with a stored report. The baseline may carry
/// `"tolerances": {"dotted.path": rel_tol}`; the longest matching prefix wins.
pub fn compare_baseline(path: &Path, results: &Value) -> Result<Vec<Drift>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read baseline {}: {e}", path.display())))?;
    let base: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("baseline is not JSON: {e}")))?;
    let tolerances: BTreeMap<String, f64> = base
        .get("tolerances")
        .and_then(|t| t.as_object())
        .map(|m| m.iter().filter_map(|(k, v)| v.as_f64().map(|f| (k.clone(), f))).collect())
        .unwrap_or_default();
    let expected = base.get("results").unwrap_or(&base);
    let mut drift = Vec::new();
    walk(expected, results, String::new(), &tolerances, &mut drift);
    Ok(drift)
}

pub const DEFAULT_REL_TOL: f64 = 1e-9;

fn tol_for(path: &str, tolerances: &BTreeMap<String, f64>) -> f64 {
    tolerances
        .iter()
        .filter(|(k, _)| path == k.as_str() || path.starts_with(&format!("{k}.")) || path.starts_with(&format!("{k}[")))
        .max_by_key(|(k, _)| k.len())
        .map(|(_, v)| *v)
        .unwrap_or(DEFAULT_REL_TOL)
}

fn walk(a: &Value, b: &Value, path: String, tol: &BTreeMap<String, f64>, out: &mut Vec<Drift>) {
    let mut push = |p: &str| out.push(Drift { path: p.to_string(), baseline: a.clone(), current: b.clone() });
    match (a, b) {
        (Value::Number(x), Value::Number(y)) => {
            let (x, y) = (x.as_f64().unwrap_or(f64::NAN), y.as_f64().unwrap_or(f64::NAN));
            if (x - y).abs() > tol_for(&path, tol) * x.abs().max(1e-300) && (x - y).abs() > 1e-300 {
                push(&path);
            }
        }
        (Value::Array(xs), Value::Array(ys)) => {
            if xs.len() != ys.len() {
                push(&path);
                return;
            }
            for (k, (x, y)) in xs.iter().zip(ys).enumerate() {
                walk(x, y, format!("{path}[{k}]"), tol, out);
            }
        }
        (Value::Object(xs), Value::Object(ys)) => {
            for (k, x) in xs {
                let p = if path.is_empty() { k.clone() } else { format!("{path}.{k}") };
                match ys.get(k) {
                    Some(y) => walk(x, y, p, tol, out),
                    None => out.push(Drift { path: p, baseline: x.clone(), current: Value::Null }),
                }
            }
        }
        _ if a == b => {}
        _ => push(&path),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn canonical_form_sorts_and_pins_floats() {
        let v = json!({"b": 0.1, "a": [1, 2.5], "c": {"z": null, "y": true}});
        let s = to_canonical(&v);
        assert_eq!(
            s,
            "{\n  \"a\": [1, 2.5000000000000000e0],\n  \"b\": 1.0000000000000001e-1,\n  \"c\": {\n    \"y\": true,\n    \"z\": null\n  }\n}\n"
        );
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["b"].as_f64(), Some(0.1));
    }

    #[test]
    fn tolerance_prefixes() {
        let mut t = BTreeMap::new();
        t.insert("points".to_string(), 1e-3);
        t.insert("points[0].ratio".to_string(), 0.5);
        assert_eq!(tol_for("points[0].ratio", &t), 0.5);
        assert_eq!(tol_for("points[1].ratio", &t), 1e-3);
        assert_eq!(tol_for("other", &t), DEFAULT_REL_TOL);
    }

    #[test]
    fn drift_detection() {
        let a = json!({"x": 1.0, "v": [1, 2], "s": "a"});
        let mut out = Vec::new();
        walk(&a, &json!({"x": 1.0 + 1e-12, "v": [1, 3], "s": "a"}), String::new(), &BTreeMap::new(), &mut out);
        assert_eq!(out.len(), 1);
        assert_eq!(out[0].path, "v[1]");
    }
}
