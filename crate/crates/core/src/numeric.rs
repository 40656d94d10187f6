//! Arithmetic backends.
//!
//! Every evaluation routine is generic over [`Scalar`], implemented for `f64`
//! (float mode) and [`Q`] (exact big-rational mode). Model data such as weights
//! and cost coefficients is always stored as `Q`, so float mode is a lossy view
//! of the same game while rational mode is bit-for-bit exact.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{ForgeError, Result};

/// Exact rational number used for all stored model data.
pub type Q = BigRational;

/// Default comparison tolerance for float mode.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

pub trait Scalar:
    Clone
    + fmt::Debug
    + fmt::Display
    + PartialEq
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + Send
    + Sync
    + 'static
{
    /// True for the rational backend: comparisons ignore tolerances.
    const EXACT: bool;

    fn from_q(q: &Q) -> Self;

    fn from_i64(v: i64) -> Self;

    fn to_f64(&self) -> f64;

    /// Applies a transcendental function. Returns `None` on the exact backend.
    fn map_f64(&self, f: impl FnOnce(f64) -> f64) -> Option<Self>;

    /// Converts a tolerance into this backend (always zero when exact).
    fn tolerance(eps: f64) -> Self;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn powu(&self, k: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..k {
            acc = acc * self.clone();
        }
        acc
    }

    fn ratio(num: i64, den: i64) -> Self {
        Self::from_i64(num) / Self::from_i64(den)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_q(q: &Q) -> Self {
        Scalar::to_f64(q)
    }

    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn map_f64(&self, f: impl FnOnce(f64) -> f64) -> Option<Self> {
        Some(f(*self))
    }

    fn tolerance(eps: f64) -> Self {
        eps
    }

    fn powu(&self, k: u32) -> Self {
        self.powi(k as i32)
    }
}

impl Scalar for Q {
    const EXACT: bool = true;

    fn from_q(q: &Q) -> Self {
        q.clone()
    }

    fn from_i64(v: i64) -> Self {
        Q::from_integer(BigInt::from(v))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn map_f64(&self, _f: impl FnOnce(f64) -> f64) -> Option<Self> {
        None
    }

    fn tolerance(_eps: f64) -> Self {
        Q::zero()
    }

    fn powu(&self, k: u32) -> Self {
        num_traits::pow(self.clone(), k as usize)
    }
}

/// `a <= b` up to a relative tolerance `tol·max(1, |b|)`.
pub fn le_tol<S: Scalar>(a: &S, b: &S, tol: &S) -> bool {
    if S::EXACT {
        return a <= b;
    }
    let scale = if b.abs() > S::one() {
        b.abs()
    } else {
        S::one()
    };
    *a <= b.clone() + tol.clone() * scale
}

/// Applies a transcendental function, failing on the exact backend.
pub fn transcendental<S: Scalar>(x: &S, what: &str, f: impl FnOnce(f64) -> f64) -> Result<S> {
    x.map_f64(f)
        .ok_or_else(|| ForgeError::Inexact(what.to_string()))
}

/// A value on the extended half-line: finite or `+∞`.
///
/// Used for approximation factors, where a deviation to a zero-cost strategy
/// from a positive cost makes the ratio unbounded.
#[derive(Clone, Debug, PartialEq)]
pub enum Extended<S> {
    Finite(S),
    Infinite,
}

impl<S: Scalar> Extended<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Extended::Infinite)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Extended::Finite(v) => v.to_f64(),
            Extended::Infinite => f64::INFINITY,
        }
    }

    /// `self <= other` with tolerance; `∞ <= ∞` holds.
    pub fn le_tol(&self, other: &Extended<S>, tol: &S) -> bool {
        match (self, other) {
            (_, Extended::Infinite) => true,
            (Extended::Infinite, Extended::Finite(_)) => false,
            (Extended::Finite(a), Extended::Finite(b)) => le_tol(a, b, tol),
        }
    }

    pub fn max(self, other: Extended<S>) -> Extended<S> {
        match self.partial_cmp(&other) {
            Some(Ordering::Less) => other,
            _ => self,
        }
    }
}

impl<S: Scalar> PartialOrd for Extended<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (Extended::Infinite, Extended::Infinite) => Some(Ordering::Equal),
            (Extended::Infinite, _) => Some(Ordering::Greater),
            (_, Extended::Infinite) => Some(Ordering::Less),
            (Extended::Finite(a), Extended::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl<S: fmt::Display> fmt::Display for Extended<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Extended::Finite(v) => v.fmt(f),
            Extended::Infinite => f.write_str("inf"),
        }
    }
}

/// Arithmetic backend selected at run time (`FORGE_MODE`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Rational,
    Float,
}

impl FromStr for Mode {
    type Err = ForgeError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "rational" | "exact" => Ok(Mode::Rational),
            "float" | "f64" => Ok(Mode::Float),
            other => Err(ForgeError::Input(format!(
                "unknown arithmetic mode `{other}` (expected rational or float)"
            ))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        })
    }
}

/// Parses `"3"`, `"-1.25"`, `"2.5e-3"` or `"7/8"` into an exact rational.
pub fn parse_q(text: &str) -> Result<Q> {
    let s = text.trim();
    let bad = || ForgeError::Input(format!("`{text}` is not a decimal or fraction"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
        let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Q::new(num, den));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part
        .chars()
        .chain(frac_part.chars())
        .all(|c| c.is_ascii_digit())
    {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = Q::from_integer(BigInt::from_str(&all_digits).map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Q::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// Canonical text form: integer, terminating decimal, or `p/q`.
pub fn format_q(q: &Q) -> String {
    if q.is_integer() {
        return q.numer().to_string();
    }
    let mut den = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while den.is_even() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return format!("{}/{}", q.numer(), q.denom());
    }
    let places = twos.max(fives);
    let scaled = q * Q::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().abs().to_string();
    let digits = format!("{digits:0>width$}", width = places + 1);
    let (int_part, frac_part) = digits.split_at(digits.len() - places);
    let sign = if q.is_negative() { "-" } else { "" };
    format!("{sign}{int_part}.{}", frac_part.trim_end_matches('0'))
}

/// Exact rational equal to the given finite float.
pub fn q_from_f64(v: f64) -> Result<Q> {
    Q::from_float(v).ok_or_else(|| ForgeError::Input(format!("{v} is not finite")))
}

pub fn q_int(v: i64) -> Q {
    Q::from_integer(BigInt::from(v))
}

pub fn q_ratio(num: i64, den: i64) -> Q {
    Q::new(BigInt::from(num), BigInt::from(den))
}

/// Serde adapter storing a [`Q`] as a decimal/fraction string.
pub mod q_string {
    use super::*;

    pub fn serialize<S: Serializer>(q: &Q, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_q(q))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Q, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Text(String),
            Int(i64),
            Float(f64),
        }
        match Raw::deserialize(d)? {
            Raw::Text(t) => parse_q(&t).map_err(serde::de::Error::custom),
            Raw::Int(i) => Ok(q_int(i)),
            Raw::Float(f) => q_from_f64(f).map_err(serde::de::Error::custom),
        }
    }
}

/// Serde adapter for `Vec<Q>`.
pub mod q_string_vec {
    use super::*;

    pub fn serialize<S: Serializer>(qs: &[Q], s: S) -> std::result::Result<S::Ok, S::Error> {
        let texts: Vec<String> = qs.iter().map(format_q).collect();
        texts.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Q>, D::Error> {
        #[derive(Deserialize)]
        struct Wrap(#[serde(with = "q_string")] Q);
        let raw: Vec<Wrap> = Vec::deserialize(d)?;
        Ok(raw.into_iter().map(|w| w.0).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_and_fractions() {
        assert_eq!(parse_q("1.5").unwrap(), q_ratio(3, 2));
        assert_eq!(parse_q("-0.125").unwrap(), q_ratio(-1, 8));
        assert_eq!(parse_q("7/8").unwrap(), q_ratio(7, 8));
        assert_eq!(parse_q("2e3").unwrap(), q_int(2000));
        assert_eq!(parse_q("2.5E-1").unwrap(), q_ratio(1, 4));
        assert_eq!(parse_q(".5").unwrap(), q_ratio(1, 2));
        assert!(parse_q("abc").is_err());
        assert!(parse_q("1/0").is_err());
        assert!(parse_q("").is_err());
    }

    #[test]
    fn formats_canonically() {
        assert_eq!(format_q(&q_int(3)), "3");
        assert_eq!(format_q(&q_ratio(3, 2)), "1.5");
        assert_eq!(format_q(&q_ratio(-1, 8)), "-0.125");
        assert_eq!(format_q(&q_ratio(1, 3)), "1/3");
        assert_eq!(format_q(&q_ratio(1, 20)), "0.05");
    }

    #[test]
    fn extended_ordering() {
        let one: Extended<f64> = Extended::Finite(1.0);
        assert!(one < Extended::Infinite);
        assert!(one.le_tol(&Extended::Infinite, &1e-9));
        assert!(!Extended::<f64>::Infinite.le_tol(&one, &1e-9));
        assert_eq!(one.clone().max(Extended::Infinite), Extended::Infinite);
    }

    #[test]
    fn rational_backend_is_exact() {
        let third = Q::ratio(1, 3);
        assert_eq!(third.clone() + third.clone() + third, Q::one());
        assert!(Q::one().map_f64(f64::ln).is_none());
        assert!(le_tol(&Q::one(), &Q::one(), &Q::tolerance(1e-3)));
        assert!(!le_tol(
            &(Q::one() + Q::ratio(1, 1_000_000)),
            &Q::one(),
            &Q::tolerance(1.0)
        ));
    }

    proptest::proptest! {
        #[test]
        fn format_parse_roundtrip(num in -100_000i64..100_000, den in 1i64..2000) {
            let q = q_ratio(num, den);
            proptest::prop_assert_eq!(parse_q(&format_q(&q)).unwrap(), q);
        }
    }
}
