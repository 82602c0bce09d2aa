//! Canonical report serialization.
//!
//! Reports are JSON with recursively sorted object keys, pretty-printed with
//! a trailing newline, so identical reports are identical bytes regardless of
//! how the report structure was assembled.

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

/// A statistic that may legitimately be non-finite. Finite values serialize
/// as plain numbers; NaN and infinities serialize as an explicit
/// `{"value": null, "reason": ...}` object instead of a bare `null`.
#[derive(Debug, Clone, Copy, PartialOrd)]
pub struct Metric(pub f64);

impl PartialEq for Metric {
    /// NaN metrics compare equal to each other so reports containing them
    /// still round-trip to an equal structure.
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0 || (self.0.is_nan() && other.0.is_nan())
    }
}

impl From<f64> for Metric {
    fn from(v: f64) -> Self {
        Metric(v)
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            serializer.serialize_f64(self.0)
        } else {
            let reason = if self.0.is_nan() {
                "nan"
            } else if self.0 > 0.0 {
                "+inf"
            } else {
                "-inf"
            };
            let mut map = serde_json::Map::new();
            map.insert("reason".to_string(), Value::String(reason.to_string()));
            map.insert("value".to_string(), Value::Null);
            Value::Object(map).serialize(serializer)
        }
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match Value::deserialize(deserializer)? {
            Value::Number(n) => n
                .as_f64()
                .map(Metric)
                .ok_or_else(|| D::Error::custom("metric number out of f64 range")),
            Value::Object(map) => match map.get("reason").and_then(Value::as_str) {
                Some("nan") => Ok(Metric(f64::NAN)),
                Some("+inf") => Ok(Metric(f64::INFINITY)),
                Some("-inf") => Ok(Metric(f64::NEG_INFINITY)),
                _ => Err(D::Error::custom("non-finite metric needs a known reason")),
            },
            other => Err(D::Error::custom(format!(
                "metric must be a number or reason object, got {other}"
            ))),
        }
    }
}

/// Serializes any report structure to canonical bytes: keys sorted at every
/// level, two-space indentation, trailing newline.
pub fn write_report<T: Serialize>(report: &T) -> Vec<u8> {
    let value = serde_json::to_value(report).expect("report serializes to JSON");
    let canonical = sort_keys(value);
    let mut bytes = serde_json::to_string_pretty(&canonical)
        .expect("JSON value prints")
        .into_bytes();
    bytes.push(b'\n');
    bytes
}

fn sort_keys(value: Value) -> Value {
    match value {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            let mut sorted = serde_json::Map::new();
            for (k, v) in entries {
                sorted.insert(k, sort_keys(v));
            }
            Value::Object(sorted)
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn empty_report_is_canonical() {
        assert_eq!(write_report(&json!({})), b"{}\n");
    }

    #[test]
    fn same_report_same_bytes() {
        let report = json!({"b": [1, 2], "a": {"z": 1.5, "y": true}});
        assert_eq!(write_report(&report), write_report(&report));
    }

    #[test]
    fn key_order_does_not_matter() {
        #[derive(Serialize)]
        struct A {
            x: u32,
            y: u32,
        }
        #[derive(Serialize)]
        struct B {
            y: u32,
            x: u32,
        }
        assert_eq!(
            write_report(&A { x: 1, y: 2 }),
            write_report(&B { y: 2, x: 1 })
        );
    }

    #[test]
    fn nan_metric_roundtrips_with_reason() {
        #[derive(Serialize, Deserialize, PartialEq, Debug)]
        struct R {
            r: Metric,
            t: Metric,
        }
        let report = R {
            r: Metric(f64::NAN),
            t: Metric(f64::INFINITY),
        };
        let bytes = write_report(&report);
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.contains("\"reason\": \"nan\""));
        assert!(text.contains("\"reason\": \"+inf\""));
        let back: R = serde_json::from_slice(&bytes).unwrap();
        assert!(back.r.0.is_nan());
        assert_eq!(back.t.0, f64::INFINITY);
        assert_eq!(back, report);
    }

    #[test]
    fn finite_metric_is_a_plain_number() {
        let bytes = write_report(&json!({ "v": Metric(0.75) }));
        assert_eq!(String::from_utf8(bytes).unwrap(), "{\n  \"v\": 0.75\n}\n");
    }
}
