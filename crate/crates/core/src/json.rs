//! Serde helpers: integers are written as JSON numbers when they fit in an
//! `i64` and as decimal strings otherwise; rationals as `"p/q"` strings.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::Value;

pub fn bigint_value(n: &BigInt) -> Value {
    match n.to_i64() {
        Some(v) => Value::from(v),
        None => Value::String(n.to_string()),
    }
}

pub fn rational_value(r: &BigRational) -> Value {
    if r.is_integer() {
        bigint_value(r.numer())
    } else {
        Value::String(r.to_string())
    }
}

fn value_to_bigint(v: &Value) -> Result<BigInt, String> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from))
            .ok_or_else(|| format!("not an integer: {n}")),
        Value::String(s) => s.parse().map_err(|_| format!("not an integer: {s}")),
        other => Err(format!("expected integer, found {other}")),
    }
}

fn value_to_rational(v: &Value) -> Result<BigRational, String> {
    match v {
        Value::String(s) => s.parse().map_err(|_| format!("not a rational: {s}")),
        other => value_to_bigint(other).map(BigRational::from_integer),
    }
}

pub mod bigint {
    use super::*;

    pub fn serialize<S: Serializer>(n: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        bigint_value(n).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        value_to_bigint(&Value::deserialize(d)?).map_err(D::Error::custom)
    }
}

pub mod bigint_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(bigint_value).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        Vec::<Value>::deserialize(d)?.iter().map(|v| value_to_bigint(v).map_err(D::Error::custom)).collect()
    }
}

pub mod rational {
    use super::*;

    pub fn serialize<S: Serializer>(r: &BigRational, s: S) -> Result<S::Ok, S::Error> {
        rational_value(r).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigRational, D::Error> {
        value_to_rational(&Value::deserialize(d)?).map_err(D::Error::custom)
    }
}

pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[BigRational], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(rational_value).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigRational>, D::Error> {
        Vec::<Value>::deserialize(d)?.iter().map(|v| value_to_rational(v).map_err(D::Error::custom)).collect()
    }
}
