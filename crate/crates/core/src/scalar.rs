//! Number types shared by the exact and floating-point code paths.
//!
//! Protocol enumeration, the Theorem-style feasibility criterion and the dual
//! certificate algebra are all generic over [`Scalar`], so the same code runs
//! on `f64` and on arbitrary-precision [`Rational`] values. Floating-point
//! comparisons use [`Scalar::tolerance`]; rational comparisons are exact.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// `true` when arithmetic is exact.
    const EXACT: bool;

    /// Slack used by validity checks (zero for exact types).
    fn tolerance() -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn to_f64(&self) -> f64;

    /// Square root, if representable in this type.
    fn sqrt(&self) -> Option<Self>;

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn powi(&self, exp: usize) -> Self {
        let mut out = Self::one();
        for _ in 0..exp {
            out = out * self.clone();
        }
        out
    }

    fn max_of(a: Self, b: Self) -> Self {
        if b > a {
            b
        } else {
            a
        }
    }

    fn min_of(a: Self, b: Self) -> Self {
        if b < a {
            b
        } else {
            a
        }
    }

    /// JSON encoding: numbers for floats, `"p/q"` strings for rationals.
    fn to_json(&self) -> serde_json::Value;

    fn from_json(value: &serde_json::Value) -> Result<Self>;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        1e-12
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn from_usize(n: usize) -> Self {
        n as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn sqrt(&self) -> Option<Self> {
        if *self < 0.0 {
            None
        } else {
            Some(f64::sqrt(*self))
        }
    }

    fn abs(&self) -> Self {
        f64::abs(*self)
    }

    fn powi(&self, exp: usize) -> Self {
        f64::powi(*self, exp as i32)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Number::from_f64(*self)
            .map(serde_json::Value::Number)
            .unwrap_or(serde_json::Value::Null)
    }

    fn from_json(value: &serde_json::Value) -> Result<Self> {
        match value {
            serde_json::Value::Number(n) => {
                n.as_f64().ok_or_else(|| Error::Parse(format!("not a finite number: {n}")))
            }
            serde_json::Value::String(s) => Ok(Scalar::to_f64(&parse_rational(s)?)),
            other => Err(Error::Parse(format!("expected a number, got {other}"))),
        }
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        Rational::zero()
    }

    fn from_ratio(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        if let Some(v) = ToPrimitive::to_f64(self) {
            if v.is_finite() {
                return v;
            }
        }
        // numerator and denominator too large for f64 individually
        let shift = self.numer().bits().max(self.denom().bits()).saturating_sub(900);
        let n = (self.numer() >> shift).to_f64().unwrap_or(f64::NAN);
        let d = (self.denom() >> shift).to_f64().unwrap_or(f64::NAN);
        n / d
    }

    fn sqrt(&self) -> Option<Self> {
        if self.is_negative() {
            return None;
        }
        let n = self.numer().sqrt();
        let d = self.denom().sqrt();
        if &(&n * &n) == self.numer() && &(&d * &d) == self.denom() {
            Some(Rational::new(n, d))
        } else {
            None
        }
    }

    fn abs(&self) -> Self {
        Signed::abs(self)
    }

    fn powi(&self, exp: usize) -> Self {
        num_traits::pow(self.clone(), exp)
    }

    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }

    fn from_json(value: &serde_json::Value) -> Result<Self> {
        match value {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => parse_rational(&n.to_string()),
            other => Err(Error::Parse(format!("expected a \"p/q\" string, got {other}"))),
        }
    }
}

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.7"` into an
/// exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let t = text.trim();
    let bad = || Error::Parse(format!("not a rational number: {text:?}"));
    if let Some((num, den)) = t.split_once('/') {
        let num: BigInt = num.trim().parse().map_err(|_| bad())?;
        let den: BigInt = den.trim().parse().map_err(|_| bad())?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(num, den));
    }
    let (sign, digits) = match t.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let joined = format!("{int_part}{frac_part}");
    let num: BigInt = if joined.is_empty() { BigInt::zero() } else { joined.parse().map_err(|_| bad())? };
    let den = num_traits::pow(BigInt::from(10), frac_part.len());
    Ok(Rational::new(num * sign, den))
}

/// Formats a rational as `"p/q"` (or `"p"` for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Formats `x` with `digits` significant digits in positional notation.
pub fn format_significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

/// Like [`format_significant`] with trailing zeros removed.
pub fn format_trimmed(x: f64, digits: usize) -> String {
    let s = format_significant(x, digits);
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("1/3").unwrap(), Rational::from_ratio(1, 3));
        assert_eq!(parse_rational("0.7").unwrap(), Rational::from_ratio(7, 10));
        assert_eq!(parse_rational("-2").unwrap(), Rational::from_ratio(-2, 1));
        assert_eq!(parse_rational(".25").unwrap(), Rational::from_ratio(1, 4));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn exact_square_roots() {
        assert_eq!(Scalar::sqrt(&Rational::from_ratio(9, 4)), Some(Rational::from_ratio(3, 2)));
        assert_eq!(Scalar::sqrt(&Rational::from_ratio(1, 2)), None);
    }

    #[test]
    fn huge_rationals_convert_to_f64() {
        let base = Rational::from_ratio(9998, 9999);
        let r = Scalar::powi(&base, 2000);
        let expected = (9998.0f64 / 9999.0).powi(2000);
        assert!((Scalar::to_f64(&r) - expected).abs() < 1e-12);
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_significant(0.75, 12), "0.750000000000");
        assert_eq!(format_significant(1.0, 12), "1.00000000000");
        assert_eq!(format_trimmed(1.1025000000000003, 10), "1.1025");
        assert_eq!(format_trimmed(-0.1025, 10), "-0.1025");
    }
}
