//! Scalar abstraction shared by the linear algebra and polytope code.
//!
//! Exact work runs over [`Rational`]; the inscribed-ellipsoid ascent runs over
//! `f64`. Both satisfy [`Scalar`].

use std::fmt::Debug;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

pub type Int = BigInt;
pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + PartialOrd + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    fn from_int(n: &BigInt) -> Self;

    fn from_rational(r: &Rational) -> Self;

    /// True when comparisons are exact (no rounding in field operations).
    fn is_exact() -> bool;

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }
}

impl Scalar for Rational {
    fn from_int(n: &BigInt) -> Self {
        Rational::from_integer(n.clone())
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn is_exact() -> bool {
        true
    }
}

impl Scalar for f64 {
    fn from_int(n: &BigInt) -> Self {
        n.to_f64().unwrap_or(f64::NAN)
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        false
    }
}

pub fn int(n: i64) -> Int {
    Int::from(n)
}

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(Int::from(p), Int::from(q))
}

pub fn rat_int(n: &Int) -> Rational {
    Rational::from_integer(n.clone())
}

pub fn floor(r: &Rational) -> Int {
    r.numer().div_floor(r.denom())
}

pub fn ceil(r: &Rational) -> Int {
    -((-r.numer()).div_floor(r.denom()))
}

/// Rational approximation of a finite float, rounded towards zero at the
/// given denominator.
pub fn rational_from_f64_trunc(x: f64, denom: i64) -> Rational {
    let scaled = (x * denom as f64).trunc();
    let n = BigInt::from_f64(scaled).unwrap_or_else(BigInt::zero);
    Rational::new(n, BigInt::from(denom))
}

/// Largest rational of the form p/denom that is `<= sqrt(x)`.
pub fn sqrt_floor(x: &Rational, denom: u64) -> Rational {
    assert!(!x.is_negative(), "sqrt of negative rational");
    // floor(sqrt(x * denom^2)) / denom
    let d = BigInt::from(denom);
    let scaled = x * Rational::from_integer(&d * &d);
    let s = floor(&scaled).sqrt();
    Rational::new(s, d)
}

/// Smallest rational of the form p/denom that is `>= sqrt(x)`.
pub fn sqrt_ceil(x: &Rational, denom: u64) -> Rational {
    let lo = sqrt_floor(x, denom);
    if &(&lo * &lo) == x {
        lo
    } else {
        lo + Rational::new(BigInt::one(), BigInt::from(denom))
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().ok()?;
        let q: BigInt = q.trim().parse().ok()?;
        if q.is_zero() {
            return None;
        }
        Some(Rational::new(p, q))
    } else {
        s.parse::<BigInt>().ok().map(Rational::from_integer)
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn pow_rational(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}


/// JSON form of an integer: a number when it fits in `i64`, otherwise a
/// decimal string.
pub fn int_to_json(n: &Int) -> serde_json::Value {
    match n.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::String(n.to_string()),
    }
}

pub fn int_from_json(v: &serde_json::Value) -> Option<Int> {
    match v {
        serde_json::Value::Number(x) => x.as_i64().map(Int::from).or_else(|| x.as_u64().map(Int::from)),
        serde_json::Value::String(s) => s.trim().parse().ok(),
        _ => None,
    }
}

/// `#[serde(with)]` adaptor for [`Int`] fields.
pub mod json_int {
    use serde::{de::Error as _, Deserialize, Deserializer, Serialize, Serializer};

    use super::{int_from_json, int_to_json, Int};

    pub fn serialize<S: Serializer>(n: &Int, s: S) -> Result<S::Ok, S::Error> {
        int_to_json(n).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Int, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        int_from_json(&v).ok_or_else(|| D::Error::custom(format!("expected an integer, found {v}")))
    }
}

/// `#[serde(with)]` adaptor for [`Rational`] fields, written as `"p/q"`.
pub mod json_rational {
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let text = match &v {
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Number(n) if n.is_i64() || n.is_u64() => n.to_string(),
            _ => return Err(D::Error::custom(format!("expected a rational \"p/q\", found {v}"))),
        };
        parse_rational(&text).ok_or_else(|| D::Error::custom(format!("malformed rational {text:?}")))
    }
}

/// `#[serde(with)]` adaptor for lists of [`Rational`].
pub mod json_rationals {
    use serde::{ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    use super::{format_rational, Rational};

    pub fn serialize<S: Serializer>(rs: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(rs.len()))?;
        for r in rs {
            seq.serialize_element(&format_rational(r))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super::json_rational")] Rational);
        let v: Vec<Wrap> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}

/// `#[serde(with)]` adaptor for lists of [`Int`].
pub mod json_ints {
    use serde::{ser::SerializeSeq, Deserialize, Deserializer, Serializer};

    use super::{int_to_json, Int};

    pub fn serialize<S: Serializer>(ns: &[Int], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(ns.len()))?;
        for n in ns {
            seq.serialize_element(&int_to_json(n))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Int>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "super::json_int")] Int);
        let v: Vec<Wrap> = Vec::deserialize(d)?;
        Ok(v.into_iter().map(|w| w.0).collect())
    }
}
