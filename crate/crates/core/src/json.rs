use serde::Serializer;

/// Finite values as numbers, ±∞ as the strings "inf"/"-inf", NaN as null.
pub(crate) fn extended_f64<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_nan() {
        s.serialize_none()
    } else if v.is_infinite() {
        s.serialize_str(if *v > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*v)
    }
}

pub(crate) fn extended_value(v: f64) -> serde_json::Value {
    if v.is_nan() {
        serde_json::Value::Null
    } else if v.is_infinite() {
        serde_json::Value::from(if v > 0.0 { "inf" } else { "-inf" })
    } else {
        serde_json::Value::from(v)
    }
}
