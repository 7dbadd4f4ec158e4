//! Exact time values.
//!
//! Times are rationals so the difference-constraint solver and the grid
//! oracle compare bit-exactly. In text they are written as nonnegative
//! decimals (`3`, `2.5`), and printed back as the shortest decimal that
//! parses to the same value.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::{Signed, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed time value {0:?}: expected a nonnegative decimal")]
pub struct ParseTimeError(pub String);

/// A point or duration on the time axis, in time units.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Time(Rational64);

impl Time {
    pub const ZERO: Time = Time(Rational64::new_raw(0, 1));

    pub fn from_integer(n: i64) -> Self {
        Time(Rational64::from_integer(n))
    }

    /// `numer / denom`. Panics if `denom` is zero.
    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Time(Rational64::new(numer, denom))
    }

    pub fn as_rational(&self) -> Rational64 {
        self.0
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    /// Whether `self` is an integer multiple of `step`. Panics if `step` is zero.
    pub fn is_multiple_of(&self, step: Time) -> bool {
        (self.0 / step.0).is_integer()
    }

    pub fn scaled(self, factor: i64) -> Time {
        Time(self.0 * factor)
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl From<i64> for Time {
    fn from(n: i64) -> Self {
        Time::from_integer(n)
    }
}

impl Add for Time {
    type Output = Time;
    fn add(self, rhs: Time) -> Time {
        Time(self.0 + rhs.0)
    }
}

impl Sub for Time {
    type Output = Time;
    fn sub(self, rhs: Time) -> Time {
        Time(self.0 - rhs.0)
    }
}

impl Neg for Time {
    type Output = Time;
    fn neg(self) -> Time {
        Time(-self.0)
    }
}

impl fmt::Display for Time {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (numer, denom) = (*self.0.numer(), *self.0.denom());
        if denom == 1 {
            return write!(f, "{numer}");
        }
        // A terminating decimal exists iff denom = 2^a * 5^b.
        let mut rest = denom;
        let (mut twos, mut fives) = (0u32, 0u32);
        while rest % 2 == 0 {
            rest /= 2;
            twos += 1;
        }
        while rest % 5 == 0 {
            rest /= 5;
            fives += 1;
        }
        let digits = twos.max(fives);
        let scaled = 10i128
            .checked_pow(digits)
            .map(|p| numer as i128 * (p / denom as i128));
        match (rest, scaled) {
            (1, Some(scaled)) => {
                let sign = if scaled < 0 { "-" } else { "" };
                let abs = scaled.unsigned_abs();
                let p = 10u128.pow(digits);
                write!(
                    f,
                    "{sign}{}.{:0width$}",
                    abs / p,
                    abs % p,
                    width = digits as usize
                )
            }
            _ => write!(f, "{numer}/{denom}"),
        }
    }
}

impl FromStr for Time {
    type Err = ParseTimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseTimeError(s.to_string());
        let (int, frac) = match s.split_once('.') {
            Some((i, f)) => (i, f),
            None => (s, ""),
        };
        let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
        if int.is_empty() || !all_digits(int) || !all_digits(frac) {
            return Err(err());
        }
        if s.contains('.') && frac.is_empty() {
            return Err(err());
        }
        let frac_digits = u32::try_from(frac.len()).map_err(|_| err())?;
        let scale = 10i64.checked_pow(frac_digits).ok_or_else(err)?;
        let int: i64 = int.parse().map_err(|_| err())?;
        let frac: i64 = if frac.is_empty() {
            0
        } else {
            frac.parse().map_err(|_| err())?
        };
        let numer = int
            .checked_mul(scale)
            .and_then(|v| v.checked_add(frac))
            .ok_or_else(err)?;
        Ok(Time(Rational64::new(numer, scale)))
    }
}

/// A latest firing time: finite or unbounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum UpperBound {
    Finite(Time),
    Infinite,
}

impl UpperBound {
    pub fn finite(&self) -> Option<Time> {
        match self {
            UpperBound::Finite(t) => Some(*t),
            UpperBound::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, UpperBound::Infinite)
    }
}

impl From<Time> for UpperBound {
    fn from(t: Time) -> Self {
        UpperBound::Finite(t)
    }
}

impl PartialOrd for UpperBound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for UpperBound {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (UpperBound::Finite(a), UpperBound::Finite(b)) => a.cmp(b),
            (UpperBound::Finite(_), UpperBound::Infinite) => Ordering::Less,
            (UpperBound::Infinite, UpperBound::Finite(_)) => Ordering::Greater,
            (UpperBound::Infinite, UpperBound::Infinite) => Ordering::Equal,
        }
    }
}

impl PartialEq<Time> for UpperBound {
    fn eq(&self, other: &Time) -> bool {
        *self == UpperBound::Finite(*other)
    }
}

impl PartialOrd<Time> for UpperBound {
    fn partial_cmp(&self, other: &Time) -> Option<Ordering> {
        Some(self.cmp(&UpperBound::Finite(*other)))
    }
}

impl fmt::Display for UpperBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpperBound::Finite(t) => t.fmt(f),
            UpperBound::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for UpperBound {
    type Err = ParseTimeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "inf" {
            Ok(UpperBound::Infinite)
        } else {
            s.parse().map(UpperBound::Finite)
        }
    }
}

impl Zero for Time {
    fn zero() -> Self {
        Time::ZERO
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}
