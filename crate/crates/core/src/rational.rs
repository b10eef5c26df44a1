//! Exact rational arithmetic helpers.
//!
//! Everything numeric in this crate is a [`Rational`]; on the wire rationals
//! are strings of the form `"a/b"` (or `"a"` for integers).

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serializer};

pub type Rational = num_rational::BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `2^(-n)`.
pub fn dyadic(n: usize) -> Rational {
    Rational::new(BigInt::one(), BigInt::one() << n)
}

pub fn parse(s: &str) -> Option<Rational> {
    let s = s.trim();
    let r: Rational = s.parse().ok()?;
    // BigRational parsing accepts "1/0" as a panic-free error, but be explicit.
    if r.denom().is_zero() {
        return None;
    }
    Some(r)
}

pub fn to_string(r: &Rational) -> String {
    r.to_string()
}

pub mod serde_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&r.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        parse(&raw).ok_or_else(|| serde::de::Error::custom(format!("bad rational {raw:?}")))
    }
}

pub mod serde_str_opt {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&r.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<Rational>, D::Error> {
        let raw = Option::<String>::deserialize(d)?;
        raw.map(|raw| parse(&raw).ok_or_else(|| serde::de::Error::custom(format!("bad rational {raw:?}")))).transpose()
    }
}

pub mod serde_str_vec {
    use super::*;
    use serde::ser::SerializeSeq;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(v.len()))?;
        for r in v {
            seq.serialize_element(&r.to_string())?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.into_iter()
            .map(|r| parse(&r).ok_or_else(|| serde::de::Error::custom(format!("bad rational {r:?}"))))
            .collect()
    }
}
