//! 128-bit fixed-point fractions of one.
//!
//! A [`Fixed128`] stores a value in `[0, 1)` as an unsigned 128-bit numerator
//! over `2^128`. Wrapping multiplication by an integer is exact mod-1
//! arithmetic at `2^-128` resolution, which keeps orbit computations such as
//! `{n * alpha}` free of floating-point drift for every index that fits in a
//! `u64`.

use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// `2^-128`, the resolution of a [`Fixed128`].
const TWO_NEG_128: f64 = 2.938735877055719e-39;

const MANTISSA_MASK: u64 = (1 << 52) - 1;

/// A fraction of one with 128 binary digits: the bits `b` represent
/// `b / 2^128`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Fixed128(u128);

/// Failure to read a decimal fraction.
#[derive(Debug, Error, PartialEq, Eq)]
#[error("expected a decimal fraction in [0, 1) like \"0.618\", got {0:?}")]
pub struct FixedParseError(pub String);

impl Fixed128 {
    pub const ZERO: Fixed128 = Fixed128(0);
    /// `2^-128`, the smallest positive fraction.
    pub const MIN_POSITIVE: Fixed128 = Fixed128(1);
    pub const HALF: Fixed128 = Fixed128(1 << 127);

    pub const fn from_bits(bits: u128) -> Self {
        Fixed128(bits)
    }

    pub const fn to_bits(self) -> u128 {
        self.0
    }

    pub const fn is_zero(self) -> bool {
        self.0 == 0
    }

    /// `{n * self}`: the fractional part of an integer multiple, computed by
    /// wrapping 128-bit multiplication. Exact for every `n`.
    pub const fn wrapping_mul_int(self, n: u64) -> Self {
        Fixed128(self.0.wrapping_mul(n as u128))
    }

    /// Distance to `other` on the line (not the circle).
    pub const fn abs_diff(self, other: Self) -> Self {
        Fixed128(self.0.abs_diff(other.0))
    }

    /// Nearest `f64` in `[0, 1)`; the result never rounds up to `1.0` and is
    /// within `2^-53` of the exact fraction.
    pub fn to_f64(self) -> f64 {
        let v = (self.0 as f64) * TWO_NEG_128;
        if v >= 1.0 {
            f64::from_bits(1.0f64.to_bits() - 1)
        } else {
            v
        }
    }

    /// The exact fixed representation of `value`, when it has one: `value`
    /// must lie in `(0, 1)` and carry no bits below `2^-128`.
    pub fn from_f64_exact(value: f64) -> Option<Self> {
        if !(value > 0.0 && value < 1.0) {
            return None;
        }
        let bits = value.to_bits();
        let raw_exp = ((bits >> 52) & 0x7ff) as i32;
        let (mantissa, exp) = if raw_exp == 0 {
            (bits & MANTISSA_MASK, -1074)
        } else {
            ((bits & MANTISSA_MASK) | (1 << 52), raw_exp - 1075)
        };
        let shift = exp + 128;
        if shift >= 0 {
            // value < 1 bounds the shift by 75, so this cannot overflow
            Some(Fixed128((mantissa as u128) << shift))
        } else if mantissa.trailing_zeros() as i32 >= -shift {
            Some(Fixed128((mantissa >> (-shift)) as u128))
        } else {
            None
        }
    }

    /// `floor(numer * 2^128 / denom)` for `numer < denom <= 2^127`.
    pub fn from_ratio(numer: u128, denom: u128) -> Option<Self> {
        if denom == 0 || denom > (1 << 127) || numer >= denom {
            return None;
        }
        let mut rem = numer;
        let mut bits = 0u128;
        for _ in 0..128 {
            bits <<= 1;
            rem <<= 1; // rem < denom <= 2^127, so no overflow
            if rem >= denom {
                rem -= denom;
                bits |= 1;
            }
        }
        Some(Fixed128(bits))
    }

    /// Parses `"0.d..."` (or `".d..."`) and truncates to 128 binary digits,
    /// i.e. `floor(value * 2^128) / 2^128`. Exact decimal-to-binary long
    /// division; no precision is lost to an intermediate float.
    pub fn from_decimal_str(s: &str) -> Result<Self, FixedParseError> {
        let trimmed = s.trim();
        let rest = trimmed
            .strip_prefix("0.")
            .or_else(|| trimmed.strip_prefix('.'))
            .ok_or_else(|| FixedParseError(s.to_string()))?;
        if rest.is_empty() || !rest.bytes().all(|b| b.is_ascii_digit()) {
            return Err(FixedParseError(s.to_string()));
        }
        let mut digits: Vec<u8> = rest.bytes().map(|b| b - b'0').collect();
        let mut bits = 0u128;
        for _ in 0..128 {
            let mut carry = 0u8;
            for d in digits.iter_mut().rev() {
                let doubled = *d * 2 + carry;
                *d = doubled % 10;
                carry = doubled / 10;
            }
            bits = (bits << 1) | u128::from(carry);
        }
        Ok(Fixed128(bits))
    }
}

impl fmt::Debug for Fixed128 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Fixed128({:#034x})", self.0)
    }
}

impl Serialize for Fixed128 {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format!("{:#034x}", self.0))
    }
}

impl<'de> Deserialize<'de> for Fixed128 {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        let digits = s.strip_prefix("0x").unwrap_or(&s);
        u128::from_str_radix(digits, 16)
            .map(Fixed128)
            .map_err(|e| D::Error::custom(format!("invalid fixed-point literal {s:?}: {e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_round_trips() {
        assert_eq!(Fixed128::HALF.to_f64(), 0.5);
        assert_eq!(Fixed128::from_f64_exact(0.5), Some(Fixed128::HALF));
        assert_eq!(Fixed128::from_ratio(1, 2), Some(Fixed128::HALF));
        assert_eq!(Fixed128::from_decimal_str("0.5"), Ok(Fixed128::HALF));
    }

    #[test]
    fn wrapping_multiple_of_half_wraps_to_zero() {
        assert_eq!(Fixed128::HALF.wrapping_mul_int(2), Fixed128::ZERO);
        assert_eq!(Fixed128::HALF.wrapping_mul_int(3), Fixed128::HALF);
    }

    #[test]
    fn ratio_matches_decimal_parse() {
        // 7/9 has both an exact ratio path and a decimal-digits path
        let by_ratio = Fixed128::from_ratio(7, 9).unwrap();
        let by_decimal =
            Fixed128::from_decimal_str("0.77777777777777777777777777777777777777777777777")
                .unwrap();
        assert!(by_ratio.abs_diff(by_decimal).to_bits() <= 1);
    }

    #[test]
    fn to_f64_never_reaches_the_endpoints() {
        let top = Fixed128::from_bits(u128::MAX);
        assert!(top.to_f64() < 1.0);
        assert!(Fixed128::MIN_POSITIVE.to_f64() > 0.0);
    }

    #[test]
    fn from_f64_exact_rejects_deep_fractions() {
        // 2^-200 is a valid f64 but has bits below 2^-128
        assert_eq!(Fixed128::from_f64_exact(2f64.powi(-200)), None);
        assert_eq!(
            Fixed128::from_f64_exact(2f64.powi(-100)),
            Some(Fixed128::from_bits(1 << 28))
        );
        assert_eq!(Fixed128::from_f64_exact(0.0), None);
        assert_eq!(Fixed128::from_f64_exact(1.0), None);
    }

    #[test]
    fn decimal_parse_rejects_garbage() {
        for bad in ["", "1", "1.0", "0.5e-1", "0.", "-0.5", "0.5 0.6"] {
            assert!(Fixed128::from_decimal_str(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn serde_hex_round_trip() {
        let x = Fixed128::from_bits(0x9e3779b97f4a7c15f39cc0605cedc834);
        let json = serde_json::to_string(&x).unwrap();
        assert_eq!(json, "\"0x9e3779b97f4a7c15f39cc0605cedc834\"");
        let back: Fixed128 = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
    }
}
