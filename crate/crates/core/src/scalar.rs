//! Numeric abstraction shared by every game and value computation.
//!
//! Experiments run on `f64`; census, uniqueness and the worked examples run
//! on [`Rational`] so that comparisons are exact.

use std::fmt::{Debug, Display};
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational number.
pub type Rational = BigRational;

/// A field element usable as a coalition worth.
pub trait Scalar:
    Num + Neg<Output = Self> + Clone + PartialOrd + Debug + Display + Send + Sync + 'static
{
    /// True when arithmetic is exact and comparisons need no tolerance.
    const EXACT: bool;

    /// Absolute tolerance for equality tests; zero in exact mode.
    fn tolerance() -> Self;

    fn from_i64(value: i64) -> Self;

    fn from_ratio(numerator: i64, denominator: i64) -> Self {
        Self::from_i64(numerator) / Self::from_i64(denominator)
    }

    /// Exact image of a binary float (every finite `f64` is a dyadic rational).
    fn from_f64(value: f64) -> Self;

    fn to_f64(&self) -> f64;

    /// Parses a decimal (`-1.25`, `3e-2`) or a fraction (`7/3`).
    fn parse_value(token: &str) -> Option<Self>;

    fn abs_value(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    /// `|self - other| <= tolerance`.
    fn approx_eq(&self, other: &Self) -> bool {
        (self.clone() - other.clone()).abs_value() <= Self::tolerance()
    }

    /// `self >= -tolerance`.
    fn is_nonnegative(&self) -> bool {
        *self >= -Self::tolerance()
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn tolerance() -> Self {
        1e-9
    }

    fn from_i64(value: i64) -> Self {
        value as f64
    }

    fn from_f64(value: f64) -> Self {
        value
    }

    fn to_f64(&self) -> f64 {
        *self
    }

    fn parse_value(token: &str) -> Option<Self> {
        if token.contains('/') {
            return Rational::parse_value(token).map(|q| Scalar::to_f64(&q));
        }
        token.parse::<f64>().ok().filter(|x| x.is_finite())
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn tolerance() -> Self {
        Self::zero()
    }

    fn from_i64(value: i64) -> Self {
        Rational::from_integer(BigInt::from(value))
    }

    fn from_f64(value: f64) -> Self {
        Rational::from_float(value).expect("finite float")
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or_else(|| {
            let sign = if self.is_negative() { -1.0 } else { 1.0 };
            sign * f64::INFINITY
        })
    }

    fn parse_value(token: &str) -> Option<Self> {
        if let Some((p, q)) = token.split_once('/') {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            return (!q.is_zero()).then(|| Rational::new(p, q));
        }
        parse_decimal(token)
    }

    fn abs_value(&self) -> Self {
        self.abs()
    }
}

fn parse_decimal(token: &str) -> Option<Rational> {
    let (mantissa, exponent) = match token.find(['e', 'E']) {
        Some(at) => (&token[..at], token[at + 1..].parse::<i32>().ok()?),
        None => (token, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (whole, frac) = digits.split_once('.').unwrap_or((digits, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let mut numer: BigInt = format!("{whole}{frac}").parse().unwrap_or_default();
    if negative {
        numer = -numer;
    }
    let shift = exponent - frac.len() as i32;
    let ten = BigInt::from(10);
    let power = num_traits::pow(ten, shift.unsigned_abs() as usize);
    Some(if shift >= 0 {
        Rational::from_integer(numer * power)
    } else {
        Rational::new(numer, power)
    })
}

/// Sum of `items`, starting from zero.
pub fn sum<S: Scalar>(items: impl IntoIterator<Item = S>) -> S {
    items.into_iter().fold(S::zero(), |acc, x| acc + x)
}

/// Largest absolute componentwise difference, as `f64`.
pub fn max_abs_diff<S: Scalar>(a: &[S], b: &[S]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x.clone() - y.clone()).abs_value().to_f64())
        .fold(0.0, f64::max)
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_exact_values() {
        let q = |s: &str| Rational::parse_value(s);
        assert_eq!(q("0.1"), Some(Rational::from_ratio(1, 10)));
        assert_eq!(q("-1.25e1"), Some(Rational::from_ratio(-25, 2)));
        assert_eq!(q("3e-2"), Some(Rational::from_ratio(3, 100)));
        assert_eq!(q("7/3"), Some(Rational::from_ratio(7, 3)));
        assert_eq!(q(".5"), Some(Rational::from_ratio(1, 2)));
        assert_eq!(q("1/0"), None);
        assert_eq!(q("abc"), None);
        assert_eq!(q("."), None);
        assert_eq!(f64::parse_value("1/4"), Some(0.25));
        assert_eq!(f64::parse_value("nan"), None);
    }

    #[test]
    fn rational_from_f64_is_exact() {
        let q = Rational::from_f64(0.1);
        assert_eq!(Scalar::to_f64(&q), 0.1);
        assert_ne!(q, Rational::from_ratio(1, 10));
    }

    #[test]
    fn tolerance_modes() {
        assert!(1.0f64.approx_eq(&(1.0 + 1e-12)));
        assert!(!Rational::from_ratio(1, 3).approx_eq(&Rational::from_f64(1.0 / 3.0)));
        assert!((-1e-12f64).is_nonnegative());
        assert!(!Rational::from_ratio(-1, 1_000_000_000_000).is_nonnegative());
    }
}
