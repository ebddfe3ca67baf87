//! Numeric modes: `f64` for the default double-precision engine and
//! [`Rational`] for exact golden checks.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational.
pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// True when arithmetic is exact; comparisons then ignore tolerances.
    const EXACT: bool;

    fn from_ratio(num: i64, den: i64) -> Self;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }

    fn to_f64(&self) -> f64;

    /// Parses an integer, a fraction `a/b`, or a decimal such as `0.075` or
    /// `2.5e-3`. Decimals are read exactly in rational mode.
    fn parse(text: &str) -> Result<Self>;

    /// Zero for pivoting purposes.
    fn is_negligible(&self) -> bool;

    fn close_to(&self, other: &Self, tol: f64) -> bool {
        if Self::EXACT {
            self == other
        } else {
            (self.clone() - other.clone()).abs().to_f64() <= tol
        }
    }

    fn powi(&self, exp: usize) -> Self {
        num_traits::pow(self.clone(), exp)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((a, b)) = text.split_once('/') {
            let a: f64 = a.trim().parse().map_err(|_| bad_number(text))?;
            let b: f64 = b.trim().parse().map_err(|_| bad_number(text))?;
            if b == 0.0 {
                return Err(bad_number(text));
            }
            return Ok(a / b);
        }
        text.parse().map_err(|_| bad_number(text))
    }

    fn is_negligible(&self) -> bool {
        self.abs() < 1e-13
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn parse(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((a, b)) = text.split_once('/') {
            let a = parse_decimal(a.trim()).ok_or_else(|| bad_number(text))?;
            let b = parse_decimal(b.trim()).ok_or_else(|| bad_number(text))?;
            if b.is_zero() {
                return Err(bad_number(text));
            }
            return Ok(a / b);
        }
        parse_decimal(text).ok_or_else(|| bad_number(text))
    }

    fn is_negligible(&self) -> bool {
        self.is_zero()
    }
}

fn bad_number(text: &str) -> Error {
    Error::Parse(format!("not a number: {text:?}"))
}

/// Exact value of a decimal literal with optional exponent.
fn parse_decimal(text: &str) -> Option<Rational> {
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let numer = BigInt::parse_bytes(if digits.is_empty() { b"0" } else { digits.as_bytes() }, 10)?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = BigRational::from_integer(numer);
    if scale >= 0 {
        value *= BigRational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= BigRational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Some(if negative { -value } else { value })
}

/// Converts an `f64` through its shortest decimal representation, so `0.075`
/// becomes exactly `3/40` rather than the nearest binary fraction.
pub fn from_f64_decimal<S: Scalar>(x: f64) -> Result<S> {
    if !x.is_finite() {
        return Err(Error::Parse(format!("non-finite number {x}")));
    }
    S::parse(&format!("{x}"))
}
