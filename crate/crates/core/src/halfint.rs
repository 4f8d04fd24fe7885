//! Non-negative half-integers stored as doubled integers.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A non-negative half-integer `n/2`, stored as `n`.
///
/// Spins, total angular momenta and hyperfine quantum numbers all live here so
/// that triangle and parity checks stay in exact integer arithmetic.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(u32);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a non-negative half-integer: {0:?}")]
pub struct HalfIntParseError(pub String);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);
    pub const THREE_HALVES: HalfInt = HalfInt(3);

    pub const fn from_twice(twice: u32) -> Self {
        HalfInt(twice)
    }

    pub const fn from_int(n: u32) -> Self {
        HalfInt(2 * n)
    }

    /// Returns `None` unless `2x` is a non-negative integer.
    pub fn from_f64(x: f64) -> Option<Self> {
        let twice = 2.0 * x;
        if x.is_finite() && x >= 0.0 && twice.fract() == 0.0 && twice <= u32::MAX as f64 {
            Some(HalfInt(twice as u32))
        } else {
            None
        }
    }

    pub const fn twice(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0.is_multiple_of(2)
    }

    /// `x(x+1)` as a float.
    pub fn casimir(self) -> f64 {
        let x = self.value();
        x * (x + 1.0)
    }

    /// `4 x(x+1) = n(n+2)` for `x = n/2`; exact.
    pub const fn casimir_times_four(self) -> i64 {
        let n = self.0 as i64;
        n * (n + 2)
    }

    /// The ladder `|a - b|, |a - b| + 1, ..., a + b`.
    pub fn coupled_range(a: HalfInt, b: HalfInt) -> impl Iterator<Item = HalfInt> {
        let lo = a.0.abs_diff(b.0);
        let hi = a.0 + b.0;
        (lo..=hi).step_by(2).map(HalfInt)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl FromStr for HalfInt {
    type Err = HalfIntParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let err = || HalfIntParseError(s.to_string());
        if let Some((num, den)) = t.split_once('/') {
            let num: u32 = num.trim().parse().map_err(|_| err())?;
            match den.trim() {
                "2" => Ok(HalfInt(num)),
                "1" => num.checked_mul(2).map(HalfInt).ok_or_else(err),
                _ => Err(err()),
            }
        } else if let Ok(n) = t.parse::<u32>() {
            n.checked_mul(2).map(HalfInt).ok_or_else(err)
        } else {
            t.parse::<f64>()
                .ok()
                .and_then(HalfInt::from_f64)
                .ok_or_else(err)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Text(String),
            Number(f64),
        }
        match Repr::deserialize(deserializer)? {
            Repr::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Repr::Number(x) => HalfInt::from_f64(x)
                .ok_or_else(|| serde::de::Error::custom(HalfIntParseError(x.to_string()))),
        }
    }
}
