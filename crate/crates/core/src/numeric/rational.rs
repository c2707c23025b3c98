use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Exact fraction `num/den` over machine integers.
///
/// Always kept in canonical form: `den > 0` and `gcd(|num|, den) = 1`, so
/// structural equality is numeric equality. Every arithmetic operation is
/// carried out in 128-bit intermediates and fails with
/// [`Error::RationalOverflow`] if the reduced result does not fit in `i64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rational {
    num: i64,
    den: i64,
}

pub(crate) fn gcd_u128(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

fn gcd_i64(a: i64, b: i64) -> i64 {
    gcd_u128(a.unsigned_abs() as u128, b.unsigned_abs() as u128) as i64
}

/// Least common multiple of two positive integers, with overflow detection.
pub fn lcm(a: i64, b: i64) -> Result<i64> {
    if a == 0 || b == 0 {
        return Ok(0);
    }
    let g = gcd_i64(a, b);
    (a / g).checked_mul(b).map(i64::abs).ok_or(Error::RationalOverflow)
}

impl Rational {
    pub const ZERO: Rational = Rational { num: 0, den: 1 };
    pub const ONE: Rational = Rational { num: 1, den: 1 };

    pub fn new(num: i64, den: i64) -> Result<Self> {
        Self::from_wide(num as i128, den as i128)
    }

    pub const fn from_integer(n: i64) -> Self {
        Rational { num: n, den: 1 }
    }

    fn from_wide(num: i128, den: i128) -> Result<Self> {
        if den == 0 {
            return Err(Error::ZeroDenominator);
        }
        let g = gcd_u128(num.unsigned_abs(), den.unsigned_abs()) as i128;
        let (mut num, mut den) = (num / g, den / g);
        if den < 0 {
            num = -num;
            den = -den;
        }
        let num = i64::try_from(num).map_err(|_| Error::RationalOverflow)?;
        let den = i64::try_from(den).map_err(|_| Error::RationalOverflow)?;
        Ok(Rational { num, den })
    }

    pub fn numer(&self) -> i64 {
        self.num
    }

    pub fn denom(&self) -> i64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn is_positive(&self) -> bool {
        self.num > 0
    }

    pub fn is_integer(&self) -> bool {
        self.den == 1
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn checked_add(self, rhs: Self) -> Result<Self> {
        let (a, b) = (self.wide(), rhs.wide());
        Self::from_wide(a.0 * b.1 + b.0 * a.1, a.1 * b.1)
    }

    pub fn checked_sub(self, rhs: Self) -> Result<Self> {
        let (a, b) = (self.wide(), rhs.wide());
        Self::from_wide(a.0 * b.1 - b.0 * a.1, a.1 * b.1)
    }

    pub fn checked_mul(self, rhs: Self) -> Result<Self> {
        let (a, b) = (self.wide(), rhs.wide());
        Self::from_wide(a.0 * b.0, a.1 * b.1)
    }

    pub fn checked_div(self, rhs: Self) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (a, b) = (self.wide(), rhs.wide());
        Self::from_wide(a.0 * b.1, a.1 * b.0)
    }

    pub fn checked_mul_int(self, k: i64) -> Result<Self> {
        self.checked_mul(Rational::from_integer(k))
    }

    pub fn recip(self) -> Result<Self> {
        Rational::ONE.checked_div(self)
    }

    /// Largest integer `≤ self`.
    pub fn floor(&self) -> i64 {
        self.num.div_euclid(self.den)
    }

    /// Smallest integer `≥ self`.
    pub fn ceil(&self) -> i64 {
        -(-self.num).div_euclid(self.den)
    }

    /// `Some(n)` when the value is the integer `n`.
    pub fn to_integer(&self) -> Option<i64> {
        self.is_integer().then_some(self.num)
    }

    fn wide(&self) -> (i128, i128) {
        (self.num as i128, self.den as i128)
    }
}

impl Default for Rational {
    fn default() -> Self {
        Rational::ZERO
    }
}

impl From<i64> for Rational {
    fn from(n: i64) -> Self {
        Rational::from_integer(n)
    }
}

impl Ord for Rational {
    fn cmp(&self, other: &Self) -> Ordering {
        let (a, b) = (self.wide(), other.wide());
        (a.0 * b.1).cmp(&(b.0 * a.1))
    }
}

impl PartialOrd for Rational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == 1 {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `p` or `p/q` with optional surrounding whitespace; the sign
    /// belongs to the numerator.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::RationalSyntax(s.to_string());
        let parse_int = |t: &str| -> Result<i64> {
            let t = t.trim();
            let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
            if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                return Err(bad());
            }
            t.parse::<i64>().map_err(|_| Error::RationalOverflow)
        };
        match s.split_once('/') {
            None => Ok(Rational::from_integer(parse_int(s)?)),
            Some((n, d)) => {
                let d_trim = d.trim();
                if d_trim.starts_with(['-', '+']) {
                    return Err(bad());
                }
                Rational::new(parse_int(n)?, parse_int(d_trim)?)
            }
        }
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}
