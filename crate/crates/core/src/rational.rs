//! Exact rationals for parameters and exact integer-over-degree distances.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Parameters such as ε, δ and λ.
pub type Rational = num_rational::Ratio<i64>;

/// Parses `"p/q"`, an integer, or a finite decimal such as `"0.125"`, exactly.
pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    let err = |reason: &str| Error::ParseRational {
        input: input.to_string(),
        reason: reason.to_string(),
    };
    if s.is_empty() {
        return Err(err("empty"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: i64 = p.trim().parse().map_err(|_| err("bad numerator"))?;
        let q: i64 = q.trim().parse().map_err(|_| err("bad denominator"))?;
        if q == 0 {
            return Err(err("zero denominator"));
        }
        return Ok(Rational::new(p, q));
    }
    let (negative, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err("no digits"));
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err("not a decimal"));
    }
    if frac_part.len() > 18 {
        return Err(err("too many decimal places"));
    }
    let scale = 10i64.pow(frac_part.len() as u32);
    let int: i64 = if int_part.is_empty() {
        0
    } else {
        int_part.parse().map_err(|_| err("integer part overflows"))?
    };
    let frac: i64 = if frac_part.is_empty() {
        0
    } else {
        frac_part.parse().map_err(|_| err("fraction overflows"))?
    };
    let num = int
        .checked_mul(scale)
        .and_then(|v| v.checked_add(frac))
        .ok_or_else(|| err("overflow"))?;
    let r = Rational::new(num, scale);
    Ok(if negative { -r } else { r })
}

/// Formats as `p/q` (always with a denominator, so it parses back exactly).
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub(crate) fn require_nonnegative(what: &str, r: &Rational) -> Result<()> {
    if r.is_negative() {
        Err(Error::InvalidParameter(format!("{what} must be nonnegative, got {r}")))
    } else {
        Ok(())
    }
}

pub(crate) fn require_positive(what: &str, r: &Rational) -> Result<()> {
    if r.is_negative() || r.is_zero() {
        Err(Error::InvalidParameter(format!("{what} must be positive, got {r}")))
    } else {
        Ok(())
    }
}

/// `floor(n * r)` for nonnegative `r`.
pub fn floor_mul(n: usize, r: &Rational) -> i64 {
    let num = *r.numer() as i128 * n as i128;
    num.div_euclid(*r.denom() as i128) as i64
}

/// `serde(with = ...)` adapter storing a [`Rational`] as a `"p/q"` string.
pub mod as_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// Same as [`as_str`] for optional values.
pub mod opt_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Option<Rational>, s: S) -> std::result::Result<S::Ok, S::Error> {
        match r {
            Some(r) => s.serialize_some(&format_rational(r)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<Rational>, D::Error> {
        let s: Option<String> = Option::deserialize(d)?;
        s.map(|s| parse_rational(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

/// A nonnegative count over a known positive denominator, kept unreduced so
/// the denominator still shows the degree it was measured at.
///
/// Equality and ordering compare values, so `Dist::new(2, 4) == Dist::new(1, 2)`.
/// Sums over several generators may exceed 1.
#[derive(Clone, Copy, Debug)]
pub struct Dist {
    num: u64,
    den: u64,
}

impl Dist {
    pub fn new(num: u64, den: u64) -> Dist {
        assert!(den > 0, "Dist denominator must be positive");
        Dist { num, den }
    }

    pub fn zero(den: u64) -> Dist {
        Dist::new(0, den)
    }

    pub fn one(den: u64) -> Dist {
        Dist::new(den, den)
    }

    pub fn numer(&self) -> u64 {
        self.num
    }

    pub fn denom(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.num as i64, self.den as i64)
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    /// `1 - self`, for values in `[0, 1]`.
    pub fn complement(&self) -> Dist {
        assert!(self.num <= self.den, "complement of a value above 1");
        Dist::new(self.den - self.num, self.den)
    }

    pub fn cmp_rational(&self, r: &Rational) -> Ordering {
        let lhs = self.num as i128 * *r.denom() as i128;
        let rhs = *r.numer() as i128 * self.den as i128;
        lhs.cmp(&rhs)
    }

    pub fn lt(&self, r: &Rational) -> bool {
        self.cmp_rational(r) == Ordering::Less
    }

    pub fn le(&self, r: &Rational) -> bool {
        self.cmp_rational(r) != Ordering::Greater
    }

    pub fn gt(&self, r: &Rational) -> bool {
        self.cmp_rational(r) == Ordering::Greater
    }
}

impl PartialEq for Dist {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Dist {}

impl PartialOrd for Dist {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dist {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl fmt::Display for Dist {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for Dist {
    type Err = Error;

    fn from_str(s: &str) -> Result<Dist> {
        let err = |reason: &str| Error::ParseRational {
            input: s.to_string(),
            reason: reason.to_string(),
        };
        let (p, q) = s.split_once('/').ok_or_else(|| err("expected num/den"))?;
        let num: u64 = p.trim().parse().map_err(|_| err("bad numerator"))?;
        let den: u64 = q.trim().parse().map_err(|_| err("bad denominator"))?;
        if den == 0 {
            return Err(err("zero denominator"));
        }
        Ok(Dist::new(num, den))
    }
}

impl Serialize for Dist {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Dist {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Dist, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
