//! Fixed float formatting for every file the crate writes.

/// `x` with 12 significant digits, shortest form (trailing zeros dropped,
/// exponent only when needed). Non-finite values print as `inf`, `-inf`, `nan`.
pub fn sig(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    // Round through scientific notation, then let the shortest round-trip
    // printer pick the layout.
    let rounded: f64 = format!("{x:.11e}").parse().expect("formatted float parses");
    let exp = rounded.abs().log10().floor() as i32;
    if (-5..15).contains(&exp) {
        format!("{rounded}")
    } else {
        format!("{rounded:e}")
    }
}

/// JSON value with floats rounded to 12 significant digits.
pub fn round_json(v: serde_json::Value) -> serde_json::Value {
    use serde_json::Value;
    match v {
        Value::Number(n) => match n.as_f64() {
            Some(x) if n.is_f64() => {
                let r: f64 = sig(x).parse().expect("sig output parses");
                serde_json::Number::from_f64(r)
                    .map(Value::Number)
                    .unwrap_or(Value::Null)
            }
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(round_json).collect()),
        Value::Object(o) => Value::Object(o.into_iter().map(|(k, v)| (k, round_json(v))).collect()),
        other => other,
    }
}

/// Serializer for values that may be infinite (lifetimes with no loss):
/// finite values as numbers, others as the strings of [`sig`].
pub fn serialize_lifetime<S: serde::Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else {
        s.serialize_str(&sig(*x))
    }
}
