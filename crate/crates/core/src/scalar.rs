//! Arithmetic backends.
//!
//! Every numeric routine in the crate is generic over [`Scalar`], which is
//! implemented for `f64` (fast, tolerance-based tie detection) and for
//! [`Rational`] (arbitrary precision, exact tie detection). Exhaustive
//! equilibrium enumeration runs in the rational backend so that ties between
//! hitting times are decided with zero tolerance.

use std::fmt::{Debug, Display};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational numbers backed by big integers.
pub type Rational = BigRational;

/// Default relative tolerance used when comparing floating point hitting times.
pub const DEFAULT_TIE_TOLERANCE: f64 = 1e-9;

pub trait Scalar: Num + Signed + Clone + Debug + Display + PartialOrd + Send + Sync + 'static {
    /// `true` for backends whose arithmetic is exact.
    const EXACT: bool;

    fn from_count(n: usize) -> Self;

    fn frac(num: i64, den: i64) -> Self;

    /// Parses `"0.85"`, `"17/20"`, `"1e-3"` style literals.
    fn parse_literal(text: &str) -> Result<Self>;

    fn to_f64(&self) -> f64;

    /// Natural logarithm of a positive value, evaluated without overflow.
    fn ln_value(&self) -> f64;

    /// Whether two values belong to the same tie class.
    ///
    /// Exact backends ignore `tolerance` and compare for equality.
    fn ties(&self, other: &Self, tolerance: f64) -> bool;

    /// `true` when a pivot of this magnitude should be treated as zero.
    fn negligible(&self, scale: f64) -> bool;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_count(n: usize) -> Self {
        n as f64
    }

    fn frac(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }

    fn parse_literal(text: &str) -> Result<Self> {
        let text = text.trim();
        if let Some((a, b)) = text.split_once('/') {
            let a: f64 = a
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number {text:?}")))?;
            let b: f64 = b
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad number {text:?}")))?;
            return Ok(a / b);
        }
        text.parse().map_err(|_| Error::Parse(format!("bad number {text:?}")))
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn ln_value(&self) -> f64 {
        self.ln()
    }

    fn ties(&self, other: &Self, tolerance: f64) -> bool {
        let scale = 1f64.max(self.abs()).max(other.abs());
        (self - other).abs() <= tolerance * scale
    }

    fn negligible(&self, scale: f64) -> bool {
        self.abs() <= 1e-13 * scale.max(1e-300)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_count(n: usize) -> Self {
        Rational::from_integer(BigInt::from(n))
    }

    fn frac(num: i64, den: i64) -> Self {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn parse_literal(text: &str) -> Result<Self> {
        parse_exact(text)
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn ln_value(&self) -> f64 {
        ln_bigint(self.numer()) - ln_bigint(self.denom())
    }

    fn ties(&self, other: &Self, _tolerance: f64) -> bool {
        self == other
    }

    fn negligible(&self, _scale: f64) -> bool {
        self.is_zero()
    }
}

fn ln_bigint(x: &BigInt) -> f64 {
    let x = x.abs();
    let bits = x.bits();
    if bits <= 960 {
        return x.to_f64().unwrap_or(f64::NAN).ln();
    }
    let shift = bits - 64;
    let head: BigInt = &x >> shift;
    head.to_f64().unwrap_or(f64::NAN).ln() + shift as f64 * std::f64::consts::LN_2
}

/// Parses a decimal, scientific or `a/b` literal into an exact rational.
pub fn parse_exact(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("bad rational literal {text:?}"));
    if let Some((a, b)) = text.split_once('/') {
        let a = parse_exact(a)?;
        let b = parse_exact(b)?;
        if b.is_zero() {
            return Err(bad());
        }
        return Ok(a / b);
    }
    let (mantissa, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    if !digits.chars().all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let numer = BigInt::from_str_radix(&digits, 10).map_err(|_| bad())?;
    let scale = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut value = Rational::from_integer(numer);
    if scale >= 0 {
        value *= Rational::from_integer(num_traits::pow(ten, scale as usize));
    } else {
        value /= Rational::from_integer(num_traits::pow(ten, (-scale) as usize));
    }
    Ok(if negative { -value } else { value })
}

/// Converts an `f64` into the exact rational with the same binary value.
pub fn rational_from_f64(x: f64) -> Result<Rational> {
    Rational::from_f64(x).ok_or_else(|| Error::Parse(format!("{x} is not finite")))
}
