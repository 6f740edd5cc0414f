//! Dual-mode probability scalar.
//!
//! [`ProbValue`] carries either an exact rational, kept in lowest terms by
//! `num-rational`, or a binary float. Arithmetic between two exact values is
//! exact; a float operand turns the result into a float.

use std::cmp::Ordering;
use std::fmt;
use std::iter::{Product, Sum};
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Tolerance used whenever at least one side of a comparison is a float.
pub const FLOAT_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub enum ProbValue {
    Exact(BigRational),
    Float(f64),
}

impl ProbValue {
    pub fn zero() -> Self {
        ProbValue::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        ProbValue::Exact(BigRational::one())
    }

    /// Exact `num / den`. Panics on a zero denominator.
    pub fn ratio(num: i64, den: i64) -> Self {
        ProbValue::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn integer(n: u64) -> Self {
        ProbValue::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn float(x: f64) -> Self {
        ProbValue::Float(x)
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ProbValue::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            ProbValue::Exact(r) => Some(r),
            ProbValue::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ProbValue::Exact(r) => rational_to_f64(r),
            ProbValue::Float(x) => *x,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            ProbValue::Exact(r) => r.is_zero(),
            ProbValue::Float(x) => *x == 0.0,
        }
    }

    pub fn is_positive(&self) -> bool {
        match self {
            ProbValue::Exact(r) => r.is_positive(),
            ProbValue::Float(x) => *x > 0.0,
        }
    }

    pub fn is_negative(&self) -> bool {
        match self {
            ProbValue::Exact(r) => r.is_negative(),
            ProbValue::Float(x) => *x < 0.0,
        }
    }

    pub fn abs(&self) -> Self {
        match self {
            ProbValue::Exact(r) => ProbValue::Exact(r.abs()),
            ProbValue::Float(x) => ProbValue::Float(x.abs()),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        match self {
            ProbValue::Exact(r) => ProbValue::Exact(num_traits::pow(r.clone(), exp as usize)),
            ProbValue::Float(x) => ProbValue::Float(x.powi(exp as i32)),
        }
    }

    /// Equality that is exact between rationals and tolerant once a float is involved.
    pub fn matches(&self, other: &ProbValue) -> bool {
        match (self, other) {
            (ProbValue::Exact(a), ProbValue::Exact(b)) => a == b,
            _ => {
                let (a, b) = (self.to_f64(), other.to_f64());
                let scale = 1.0_f64.max(a.abs()).max(b.abs());
                (a - b).abs() <= FLOAT_TOLERANCE * scale
            }
        }
    }

    /// Parses `"p/q"`, an integer, or a plain decimal such as `"0.7"` as an exact rational.
    pub fn parse_exact(text: &str) -> Result<Self> {
        let s = text.trim();
        let bad = || Error::MalformedRational(text.to_string());
        if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(bad());
            }
            return Ok(ProbValue::Exact(BigRational::new(num, den)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let negative = int.starts_with('-');
            let int_digits = int.trim_start_matches(['-', '+']);
            if !int_digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            let digits: BigInt = format!("{int_digits}{frac}").parse().map_err(|_| bad())?;
            let den = num_traits::pow(BigInt::from(10), frac.len());
            let value = BigRational::new(digits, den);
            return Ok(ProbValue::Exact(if negative { -value } else { value }));
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(ProbValue::Exact(BigRational::from_integer(n)))
    }
}

/// Converts a rational to f64 without overflowing on huge numerators or denominators.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && d != 0.0 {
            return n / d;
        }
    }
    let shift = r.numer().bits().max(r.denom().bits()) as i64 - 900;
    let (n, d) = if shift > 0 {
        (r.numer() >> shift as usize, r.denom() >> shift as usize)
    } else {
        (r.numer().clone(), r.denom().clone())
    };
    let d = d.to_f64().unwrap_or(f64::INFINITY);
    if d == 0.0 {
        return if r.is_negative() { f64::NEG_INFINITY } else { f64::INFINITY };
    }
    n.to_f64().unwrap_or(f64::NAN) / d
}

impl Default for ProbValue {
    fn default() -> Self {
        ProbValue::zero()
    }
}

impl From<BigRational> for ProbValue {
    fn from(r: BigRational) -> Self {
        ProbValue::Exact(r)
    }
}

impl From<f64> for ProbValue {
    fn from(x: f64) -> Self {
        ProbValue::Float(x)
    }
}

impl FromStr for ProbValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ProbValue::parse_exact(s)
    }
}

impl fmt::Display for ProbValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProbValue::Exact(r) => write!(f, "{r}"),
            ProbValue::Float(x) => write!(f, "{x}"),
        }
    }
}

impl PartialEq for ProbValue {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (ProbValue::Exact(a), ProbValue::Exact(b)) => a == b,
            _ => self.to_f64() == other.to_f64(),
        }
    }
}

impl PartialOrd for ProbValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (ProbValue::Exact(a), ProbValue::Exact(b)) => Some(a.cmp(b)),
            _ => self.to_f64().partial_cmp(&other.to_f64()),
        }
    }
}

macro_rules! binary_op {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait<&ProbValue> for &ProbValue {
            type Output = ProbValue;
            fn $method(self, rhs: &ProbValue) -> ProbValue {
                match (self, rhs) {
                    (ProbValue::Exact(a), ProbValue::Exact(b)) => ProbValue::Exact(a $op b),
                    _ => ProbValue::Float(self.to_f64() $op rhs.to_f64()),
                }
            }
        }
        impl $trait<ProbValue> for ProbValue {
            type Output = ProbValue;
            fn $method(self, rhs: ProbValue) -> ProbValue {
                match (self, rhs) {
                    (ProbValue::Exact(a), ProbValue::Exact(b)) => ProbValue::Exact(a $op b),
                    (a, b) => ProbValue::Float(a.to_f64() $op b.to_f64()),
                }
            }
        }
        impl $trait<&ProbValue> for ProbValue {
            type Output = ProbValue;
            fn $method(self, rhs: &ProbValue) -> ProbValue {
                &self $op rhs
            }
        }
        impl $trait<ProbValue> for &ProbValue {
            type Output = ProbValue;
            fn $method(self, rhs: ProbValue) -> ProbValue {
                self $op &rhs
            }
        }
    };
}

binary_op!(Add, add, +);
binary_op!(Sub, sub, -);
binary_op!(Mul, mul, *);
binary_op!(Div, div, /);

impl Neg for ProbValue {
    type Output = ProbValue;
    fn neg(self) -> ProbValue {
        match self {
            ProbValue::Exact(r) => ProbValue::Exact(-r),
            ProbValue::Float(x) => ProbValue::Float(-x),
        }
    }
}

impl Sum for ProbValue {
    fn sum<I: Iterator<Item = ProbValue>>(iter: I) -> Self {
        iter.fold(ProbValue::zero(), |acc, x| acc + x)
    }
}

impl<'a> Sum<&'a ProbValue> for ProbValue {
    fn sum<I: Iterator<Item = &'a ProbValue>>(iter: I) -> Self {
        iter.fold(ProbValue::zero(), |acc, x| acc + x)
    }
}

impl Product for ProbValue {
    fn product<I: Iterator<Item = ProbValue>>(iter: I) -> Self {
        iter.fold(ProbValue::one(), |acc, x| acc * x)
    }
}

impl<'a> Product<&'a ProbValue> for ProbValue {
    fn product<I: Iterator<Item = &'a ProbValue>>(iter: I) -> Self {
        iter.fold(ProbValue::one(), |acc, x| acc * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_arithmetic_stays_exact_and_reduced() {
        let a = ProbValue::ratio(2, 4);
        let b = ProbValue::ratio(1, 3);
        let s = &a + &b;
        assert!(s.is_exact());
        assert_eq!(s.to_string(), "5/6");
        assert_eq!((a.clone() * b.clone()).to_string(), "1/6");
        assert_eq!((a / b).to_string(), "3/2");
    }

    #[test]
    fn mixed_arithmetic_is_float() {
        let s = ProbValue::ratio(1, 2) + ProbValue::float(0.25);
        assert!(!s.is_exact());
        assert_eq!(s.to_f64(), 0.75);
    }

    #[test]
    fn parses_rationals_and_decimals() {
        assert_eq!(ProbValue::parse_exact("7/10").unwrap(), ProbValue::ratio(7, 10));
        assert_eq!(ProbValue::parse_exact("0.7").unwrap(), ProbValue::ratio(7, 10));
        assert_eq!(ProbValue::parse_exact("3").unwrap(), ProbValue::integer(3));
        assert_eq!(ProbValue::parse_exact("-0.25").unwrap(), ProbValue::ratio(-1, 4));
        assert!(ProbValue::parse_exact("1/0").is_err());
        assert!(ProbValue::parse_exact("abc").is_err());
        assert!(ProbValue::parse_exact("0.").is_err());
    }

    #[test]
    fn huge_rationals_convert_to_f64() {
        let big = ProbValue::ratio(7, 10).pow(2000) / ProbValue::ratio(3, 10).pow(580);
        let expected = (2000.0 * 0.7f64.ln() - 580.0 * 0.3f64.ln()).exp();
        let got = big.to_f64();
        assert!(((got - expected) / expected).abs() < 1e-9, "{got} vs {expected}");
    }

    #[test]
    fn tolerant_match_only_with_floats() {
        assert!(ProbValue::float(0.1 + 0.2).matches(&ProbValue::ratio(3, 10)));
        assert!(!ProbValue::ratio(1, 3).matches(&ProbValue::ratio(333_333_333_333, 1_000_000_000_000)));
    }
}
