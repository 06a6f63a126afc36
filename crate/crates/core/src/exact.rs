//! Exact rational arithmetic helpers.
//!
//! Bias values, class thresholds and rounding probabilities are kept as exact
//! rationals so that classification never flips at a threshold because of
//! floating-point rounding.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::QdError;

/// Parses a decimal string (e.g. `"-0.575"`, `"1"`, `"0.4844"`) into an exact
/// rational.
pub fn parse_decimal(s: &str) -> crate::Result<BigRational> {
    let t = s.trim();
    let (sign, digits) = match t.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, t.strip_prefix('+').unwrap_or(t)),
    };
    let (int_part, frac_part) = match digits.split_once('.') {
        Some((a, b)) => (a, b),
        None => (digits, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(QdError::Config(format!("not a decimal number: {s:?}")));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(QdError::Config(format!("not a decimal number: {s:?}")));
    }
    let mut num: BigInt = if int_part.is_empty() {
        BigInt::zero()
    } else {
        int_part.parse().expect("digits")
    };
    let mut den = BigInt::one();
    for c in frac_part.chars() {
        num = num * 10 + c.to_digit(10).unwrap();
        den *= 10;
    }
    Ok(BigRational::new(num * sign, den))
}

/// Formats a rational as a decimal-ish string for reports (lossless `p/q`).
pub fn ratio_string(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().expect("rational representable as f64")
}

pub fn ratio_u64(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio_i64(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Floor of a nonnegative rational as `u64`.
pub fn floor_u64(r: &BigRational) -> u64 {
    debug_assert!(!r.is_negative());
    (r.numer() / r.denom()).to_u64().expect("floor fits in u64")
}

/// Smallest `w` with `2^w >= x` (0 for `x <= 1`).
pub fn ceil_log2(x: u64) -> u64 {
    if x <= 1 {
        0
    } else {
        64 - (x - 1).leading_zeros() as u64
    }
}
