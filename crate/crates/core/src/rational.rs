//! Exact rational numbers and the extended data amount used by curves.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::Error;

/// Arbitrary-precision rational. Times are seconds, data is bits, rates are bits/second.
pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// `n / d`; panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Rational {
    Rational::zero()
}

/// Parses `"12"`, `"-3.25"`, `"2.5e-3"` or `"1/150"` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational, Error> {
    let s = text.trim();
    let bad = || Error::Parse(format!("not an exact number: {text:?}"));
    if s.is_empty() {
        return Err(bad());
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| bad())?;
        let d: BigInt = den.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }

    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(idx) => {
            let exp: i32 = s[idx + 1..].parse().map_err(|_| bad())?;
            (&s[..idx], exp)
        }
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
    let mut value = Rational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// Exact text form: a terminating decimal when one exists, `p/q` otherwise.
pub fn to_exact_string(q: &Rational) -> String {
    let mut den = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0usize, 0usize);
    while (&den % &two).is_zero() {
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
    let scaled = q * Rational::from_integer(num_traits::pow(BigInt::from(10), places));
    let digits = scaled.to_integer().abs().to_string();
    let sign = if q.is_negative() { "-" } else { "" };
    if places == 0 {
        return format!("{sign}{digits}");
    }
    let padded = format!("{digits:0>width$}", width = places + 1);
    let (whole, frac) = padded.split_at(padded.len() - places);
    format!("{sign}{whole}.{frac}")
}

pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or_else(|| {
        if q.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// Renders `x` with `digits` significant figures, trailing zeros trimmed.
pub fn format_significant(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let exponent = x.abs().log10().floor() as i32;
    let decimals = (digits as i32 - 1 - exponent).max(0) as usize;
    let mut s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit (9.999995 -> 10.00000)
    let carried = s
        .trim_start_matches('-')
        .split('.')
        .next()
        .map_or(0, str::len);
    if decimals > 0 && carried as i32 > exponent.max(0) + 1 {
        s = format!("{x:.prec$}", prec = decimals - 1);
    }
    if s.contains('.') {
        s = s.trim_end_matches('0').trim_end_matches('.').to_string();
    }
    if s == "-0" {
        s = "0".into();
    }
    s
}

/// A cumulative amount of data in bits: a non-negative rational or `+∞`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum DataAmount {
    Finite(Rational),
    Infinite,
}

impl DataAmount {
    pub fn zero() -> Self {
        DataAmount::Finite(Rational::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, DataAmount::Finite(_))
    }

    pub fn finite(&self) -> Option<&Rational> {
        match self {
            DataAmount::Finite(v) => Some(v),
            DataAmount::Infinite => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            DataAmount::Finite(v) => to_f64(v),
            DataAmount::Infinite => f64::INFINITY,
        }
    }

    /// `self + slope * dt`, staying infinite if already infinite.
    pub(crate) fn advance(&self, slope: &Rational, dt: &Rational) -> DataAmount {
        match self {
            DataAmount::Finite(v) => DataAmount::Finite(v + slope * dt),
            DataAmount::Infinite => DataAmount::Infinite,
        }
    }
}

impl From<Rational> for DataAmount {
    fn from(v: Rational) -> Self {
        DataAmount::Finite(v)
    }
}

impl PartialOrd for DataAmount {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DataAmount {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (DataAmount::Finite(a), DataAmount::Finite(b)) => a.cmp(b),
            (DataAmount::Finite(_), DataAmount::Infinite) => Ordering::Less,
            (DataAmount::Infinite, DataAmount::Finite(_)) => Ordering::Greater,
            (DataAmount::Infinite, DataAmount::Infinite) => Ordering::Equal,
        }
    }
}

impl Add for &DataAmount {
    type Output = DataAmount;

    fn add(self, rhs: &DataAmount) -> DataAmount {
        match (self, rhs) {
            (DataAmount::Finite(a), DataAmount::Finite(b)) => DataAmount::Finite(a + b),
            _ => DataAmount::Infinite,
        }
    }
}

impl fmt::Display for DataAmount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataAmount::Finite(v) => f.write_str(&to_exact_string(v)),
            DataAmount::Infinite => f.write_str("inf"),
        }
    }
}

/// Result of a sup/inf that may diverge: a finite rational or unbounded.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Bound {
    Finite(Rational),
    Unbounded,
}

impl Bound {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Bound::Finite(v) => Some(v),
            Bound::Unbounded => None,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Bound::Unbounded)
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Bound::Finite(v) => to_f64(v),
            Bound::Unbounded => f64::INFINITY,
        }
    }
}

impl PartialOrd for Bound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Bound {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Bound::Finite(a), Bound::Finite(b)) => a.cmp(b),
            (Bound::Finite(_), Bound::Unbounded) => Ordering::Less,
            (Bound::Unbounded, Bound::Finite(_)) => Ordering::Greater,
            (Bound::Unbounded, Bound::Unbounded) => Ordering::Equal,
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(v) => f.write_str(&to_exact_string(v)),
            Bound::Unbounded => f.write_str("unbounded"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_decimals_fractions_and_exponents() {
        assert_eq!(parse_rational("12").unwrap(), int(12));
        assert_eq!(parse_rational("-3.25").unwrap(), ratio(-13, 4));
        assert_eq!(parse_rational("1/150").unwrap(), ratio(1, 150));
        assert_eq!(parse_rational("2.5e-3").unwrap(), ratio(1, 400));
        assert_eq!(parse_rational("1.2E6").unwrap(), int(1_200_000));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.2.3").is_err());
    }

    #[test]
    fn exact_strings() {
        assert_eq!(to_exact_string(&ratio(65, 2000)), "0.0325");
        assert_eq!(to_exact_string(&ratio(1, 150)), "1/150");
        assert_eq!(to_exact_string(&int(-1280)), "-1280");
        assert_eq!(to_exact_string(&ratio(-1, 8)), "-0.125");
        assert_eq!(to_exact_string(&int(0)), "0");
    }

    #[test]
    fn exact_string_round_trips() {
        for (n, d) in [(1, 3), (7, 8), (-22, 7), (123456789, 1000), (0, 5), (5, 1)] {
            let q = ratio(n, d);
            assert_eq!(parse_rational(&to_exact_string(&q)).unwrap(), q);
        }
    }

    #[test]
    fn significant_figures() {
        assert_eq!(format_significant(1000.0 / 150.0, 3), "6.67");
        assert_eq!(format_significant(1000.0 / 150.0, 6), "6.66667");
        assert_eq!(format_significant(32.5, 6), "32.5");
        assert_eq!(format_significant(0.0325, 6), "0.0325");
        assert_eq!(format_significant(9.9999996, 6), "10");
        assert_eq!(format_significant(1_200_000.0, 6), "1200000");
        assert_eq!(format_significant(f64::INFINITY, 6), "inf");
    }

    #[test]
    fn extended_ordering() {
        assert!(DataAmount::Finite(int(5)) < DataAmount::Infinite);
        assert!(Bound::Finite(int(1_000_000)) < Bound::Unbounded);
        assert_eq!(
            &DataAmount::Finite(int(2)) + &DataAmount::Infinite,
            DataAmount::Infinite
        );
    }
}
