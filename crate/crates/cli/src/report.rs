//! Ordered reports rendered either as indented text or as JSON.
//!
//! Both renderings walk the same value tree, so they carry the same fields in
//! the same order.

use hilding::{BoundInterval, NumericPolicy};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Finite values become JSON numbers; infinities and NaN become strings.
pub fn num(v: f64) -> Value {
    serde_json::Number::from_f64(v)
        .map(Value::Number)
        .unwrap_or_else(|| {
            Value::String(if v.is_nan() {
                "nan".into()
            } else if v > 0.0 {
                "inf".into()
            } else {
                "-inf".into()
            })
        })
}

pub fn nums(v: &[f64]) -> Value {
    Value::Array(v.iter().map(|x| num(*x)).collect())
}

pub fn interval(b: &BoundInterval) -> Value {
    let mut m = Map::new();
    m.insert("lower".into(), num(b.lower));
    m.insert("upper".into(), num(b.upper));
    m.insert("exact".into(), Value::Bool(b.exact));
    Value::Object(m)
}

pub fn policy(p: &NumericPolicy) -> Value {
    let mut m = Map::new();
    m.insert("rank_tol".into(), num(p.rank_tol));
    m.insert("search_starts".into(), p.search_starts.into());
    m.insert("search_max_iters".into(), p.search_max_iters.into());
    m.insert("search_rel_tol".into(), num(p.search_rel_tol));
    m.insert("report_tol".into(), num(p.report_tol));
    m.insert("membership_tol".into(), num(p.membership_tol));
    m.insert("samples_per_step".into(), p.samples_per_step.into());
    m.insert("neumann_max_terms".into(), p.neumann_max_terms.into());
    m.insert("qr_deflation_tol".into(), num(p.qr_deflation_tol));
    m.insert("qr_iters_per_dim".into(), p.qr_iters_per_dim.into());
    m.insert("seed".into(), p.seed.into());
    Value::Object(m)
}

/// A report under construction; fields keep insertion order.
#[derive(Debug, Default)]
pub struct Report(pub Map<String, Value>);

impl Report {
    pub fn set(&mut self, key: &str, value: impl Into<Value>) -> &mut Self {
        self.0.insert(key.into(), value.into());
        self
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.0).expect("report serializes");
                s.push('\n');
                s
            }
            Format::Text => {
                let mut out = String::new();
                text_object(&self.0, 0, &mut out);
                out
            }
        }
    }
}

fn scalar(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Bool(b) => Some(b.to_string()),
        Value::Null => Some("none".into()),
        _ => None,
    }
}

fn inline(v: &Value) -> Option<String> {
    if let Some(s) = scalar(v) {
        return Some(s);
    }
    match v {
        Value::Array(items)
            if items.iter().all(|i| match i {
                Value::String(s) => matches!(s.as_str(), "inf" | "-inf" | "nan"),
                _ => true,
            }) =>
        {
            let parts: Option<Vec<String>> = items.iter().map(scalar).collect();
            parts.map(|p| format!("[{}]", p.join(", ")))
        }
        _ => None,
    }
}

fn text_object(m: &Map<String, Value>, indent: usize, out: &mut String) {
    let pad = " ".repeat(indent);
    for (k, v) in m {
        if let Some(s) = inline(v) {
            out.push_str(&format!("{pad}{k}: {s}\n"));
            continue;
        }
        out.push_str(&format!("{pad}{k}:\n"));
        match v {
            Value::Object(inner) => text_object(inner, indent + 2, out),
            Value::Array(items) => {
                for item in items {
                    match item {
                        Value::Object(inner) => {
                            out.push_str(&format!("{pad}  -\n"));
                            text_object(inner, indent + 4, out);
                        }
                        other => {
                            let s = inline(other).unwrap_or_else(|| other.to_string());
                            out.push_str(&format!("{pad}  - {s}\n"));
                        }
                    }
                }
            }
            _ => unreachable!("scalars render inline"),
        }
    }
}
