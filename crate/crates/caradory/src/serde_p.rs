//! Serde helpers for norm exponents: finite values are JSON numbers, the
//! supremum norm is the string `"inf"`.

use serde::{de, Deserialize, Deserializer, Serializer};

pub fn serialize<S: Serializer>(p: &f64, ser: S) -> Result<S::Ok, S::Error> {
    if p.is_finite() {
        ser.serialize_f64(*p)
    } else {
        ser.serialize_str("inf")
    }
}

pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<f64, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Wire {
        Num(f64),
        Str(String),
    }
    match Wire::deserialize(de)? {
        Wire::Num(x) => Ok(x),
        Wire::Str(s) => parse(&s).map_err(de::Error::custom),
    }
}

/// Parses `"inf"`/`"infinity"` (any case) or a decimal literal.
pub fn parse(s: &str) -> Result<f64, String> {
    let t = s.trim();
    if t.eq_ignore_ascii_case("inf") || t.eq_ignore_ascii_case("infinity") {
        return Ok(f64::INFINITY);
    }
    t.parse::<f64>()
        .map_err(|_| format!("invalid norm exponent `{s}` (expected a number or `inf`)"))
}
