//! Canonical JSON: sorted keys, floats rounded to 15 significant digits.

use std::fmt::Display;

use serde::{Serialize, Serializer};
use serde_json::Value;

/// Serialises any `Display` value as a JSON string.
pub fn display_string<T: Display, S: Serializer>(value: &T, serializer: S) -> Result<S::Ok, S::Error> {
    serializer.collect_str(value)
}

/// Rounds to 15 significant digits; the result prints in shortest form.
pub fn round_sig15(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.14e}").parse().unwrap_or(x)
}

fn normalise(value: Value) -> Value {
    match value {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig15(n.as_f64().unwrap_or(f64::NAN));
            serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(normalise).collect()),
        // serde_json's default map is a BTreeMap, so keys come out sorted
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalise(v))).collect()),
        other => other,
    }
}

/// Converts to a canonical `Value`.
pub fn to_canonical_value<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<Value> {
    Ok(normalise(serde_json::to_value(value)?))
}

/// Compact canonical JSON with a trailing newline.
pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string(&to_canonical_value(value)?)?;
    s.push('\n');
    Ok(s)
}

/// Indented canonical JSON with a trailing newline.
pub fn to_canonical_pretty<T: Serialize + ?Sized>(value: &T) -> serde_json::Result<String> {
    let mut s = serde_json::to_string_pretty(&to_canonical_value(value)?)?;
    s.push('\n');
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn keys_sorted_and_floats_rounded() {
        let v = json!({"z": 0.1 + 0.2, "a": [1, 2.5]});
        assert_eq!(to_canonical_string(&v).unwrap(), "{\"a\":[1,2.5],\"z\":0.3}\n");
    }

    #[test]
    fn rounding_keeps_fifteen_digits() {
        assert_eq!(round_sig15(1.0 / 3.0), 0.333333333333333);
        assert_eq!(round_sig15(-2.0), -2.0);
        assert_eq!(round_sig15(0.0), 0.0);
    }
}
