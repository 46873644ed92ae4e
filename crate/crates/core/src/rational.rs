//! Exact rational helpers shared by reports and certificates.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serializer};
use thiserror::Error;

pub type Ratio = BigRational;

pub fn ratio(num: i64, den: i64) -> Ratio {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn integer(n: i64) -> Ratio {
    BigRational::from_integer(BigInt::from(n))
}

/// Nearest `f64`, rounded to 10 significant digits.
pub fn decimal(r: &Ratio) -> f64 {
    let x = r.to_f64().unwrap_or(f64::NAN);
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.9e}").parse().unwrap_or(x)
}

/// Decimal rendering used in CSV output: 10 significant digits, shortest
/// round-trip form (`2.0`, `1.25`, `0.2222222222`).
pub fn decimal_string(r: &Ratio) -> String {
    format!("{:?}", decimal(r))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot read {0:?} as a rational number")]
pub struct RatioParseError(pub String);

/// Parses `p/q`, an integer, or a finite decimal such as `0.125`, exactly.
pub fn parse_ratio(text: &str) -> Result<Ratio, RatioParseError> {
    let err = || RatioParseError(text.to_string());
    let t = text.trim();
    if let Some((p, q)) = t.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| err())?;
        let q: BigInt = q.trim().parse().map_err(|_| err())?;
        if q.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(p, q));
    }
    let (negative, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (whole, frac) = body.split_once('.').unwrap_or((body, ""));
    if whole.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{whole}{frac}");
    let num: BigInt = if digits.is_empty() { BigInt::zero() } else { digits.parse().map_err(|_| err())? };
    let den = num_traits::pow(BigInt::from(10), frac.len());
    let r = BigRational::new(num, den);
    Ok(if negative { -r } else { r })
}

pub fn serialize<S: Serializer>(r: &Ratio, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&r.to_string())
}

pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio, D::Error> {
    let s = String::deserialize(d)?;
    parse_ratio(&s).map_err(serde::de::Error::custom)
}

pub fn is_positive(r: &Ratio) -> bool {
    r > &Ratio::zero()
}

pub fn one() -> Ratio {
    Ratio::one()
}
