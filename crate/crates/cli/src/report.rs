use std::time::{SystemTime, UNIX_EPOCH};

use num::rational::BigRational;
use num::BigUint;
use serde_json::{json, Map, Number, Value};

pub use schreier::irs::rational_json as rational;

pub const SCHEMA: u64 = 1;

/// Analysis output before it is wrapped into a report.
pub struct Outcome {
    pub result: Value,
    /// `Some(false)` when an asserted inequality failed.
    pub asserted: Option<bool>,
    /// Raw text printed instead of a JSON report (`build`).
    pub text: Option<String>,
}

impl Outcome {
    pub fn report(result: Value) -> Self {
        Outcome { result, asserted: None, text: None }
    }

    pub fn asserted(result: Value, holds: bool) -> Self {
        Outcome { result, asserted: Some(holds), text: None }
    }

    pub fn text(text: String) -> Self {
        Outcome { result: Value::Null, asserted: None, text: Some(text) }
    }
}

pub fn big(x: &BigUint) -> Value {
    Value::String(x.to_string())
}

pub fn rationals(xs: &[BigRational]) -> Value {
    Value::Array(xs.iter().map(rational).collect())
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

/// Rounds every float in `v` to 12 significant digits; non-finite floats
/// become strings so the report stays valid JSON.
pub fn round_numbers(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(f64::NAN);
            *v = match Number::from_f64(round12(x)) {
                Some(r) => Value::Number(r),
                None => Value::String(x.to_string()),
            };
        }
        Value::Array(items) => items.iter_mut().for_each(round_numbers),
        Value::Object(map) => map.values_mut().for_each(round_numbers),
        _ => {}
    }
}

pub fn float(x: f64) -> Value {
    match Number::from_f64(x) {
        Some(n) => Value::Number(n),
        None => Value::String(x.to_string()),
    }
}

pub fn envelope(command: &str, config: Value, result: Value, asserted: Option<bool>, elapsed: f64) -> Value {
    let mut out = Map::new();
    out.insert("schema".into(), json!(SCHEMA));
    out.insert("command".into(), json!(command));
    out.insert("config".into(), config);
    if let Some(holds) = asserted {
        out.insert("holds".into(), json!(holds));
    }
    out.insert("result".into(), result);
    let mut v = Value::Object(out);
    round_numbers(&mut v);
    let unix = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    v["timestamp"] = json!({ "unix_seconds": unix, "elapsed_seconds": round12(elapsed) });
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_digits() {
        assert_eq!(round12(2.0 / 3.0), 0.666666666667);
        assert_eq!(round12(1e-20 / 3.0), 3.33333333333e-21);
        assert_eq!(round12(5.0), 5.0);
        let mut v = json!({ "a": [1.0 / 7.0, 3], "b": { "c": 0.1 } });
        round_numbers(&mut v);
        assert_eq!(v["a"][0], json!(0.142857142857));
        assert_eq!(v["a"][1], json!(3));
    }
}
