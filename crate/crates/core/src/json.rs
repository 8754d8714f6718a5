//! JSON encoding with fixed float formatting, so identical inputs give
//! byte-identical output.

use std::str::FromStr;

use num_complex::Complex64;
use serde_json::{Map, Number, Value};

pub const SCHEMA: &str = "halphen-lab/1";

/// A float with 17 significant digits. Non-finite values become `null`.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let text = format!("{x:.16e}");
    Number::from_str(&text).map(Value::Number).unwrap_or(Value::Null)
}

pub fn complex(z: Complex64) -> Value {
    let mut m = Map::new();
    m.insert("re".into(), float(z.re));
    m.insert("im".into(), float(z.im));
    Value::Object(m)
}

pub fn complex_list(zs: &[Complex64]) -> Value {
    Value::Array(zs.iter().copied().map(complex).collect())
}

pub fn float_list(xs: &[f64]) -> Value {
    Value::Array(xs.iter().copied().map(float).collect())
}

/// Read a complex number from `{"re": .., "im": ..}`, `[re, im]` or a bare number.
pub fn parse_complex(v: &Value) -> Option<Complex64> {
    match v {
        Value::Number(n) => Some(Complex64::new(n.as_f64()?, 0.0)),
        Value::Array(a) if a.len() == 2 => Some(Complex64::new(a[0].as_f64()?, a[1].as_f64()?)),
        Value::Object(m) => {
            let re = m.get("re").map_or(Some(0.0), Value::as_f64)?;
            let im = m.get("im").map_or(Some(0.0), Value::as_f64)?;
            Some(Complex64::new(re, im))
        }
        _ => None,
    }
}

/// Wrap `fields` in a top-level object carrying the schema tag and `kind`.
pub fn envelope(kind: &str, fields: Map<String, Value>) -> Value {
    let mut m = Map::new();
    m.insert("schema".into(), Value::String(SCHEMA.into()));
    m.insert("kind".into(), Value::String(kind.into()));
    m.extend(fields);
    Value::Object(m)
}
