//! Serialization helpers for report types.

use serde::Serializer;

/// Serializes a possibly infinite threshold: finite values as numbers,
/// +infinity as the string "inf" (plain JSON has no infinity literal).
pub fn serialize_maybe_infinite<S: Serializer>(value: &f64, s: S) -> Result<S::Ok, S::Error> {
    if value.is_finite() {
        s.serialize_f64(*value)
    } else if *value > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}
