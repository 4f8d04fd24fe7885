//! Exact arithmetic on the decimal values that floats were written as.
//!
//! `1e-13 / 2e-21` in binary floating point is `50000000.00000001`; read as
//! the decimals 10⁻¹³ and 2·10⁻²¹ the quotient is exactly 5·10⁷. Each input is
//! taken at its shortest round-trip decimal representation and the result is
//! rounded once.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// The shortest decimal that round-trips to `x`, as an exact rational.
/// `None` for non-finite input.
pub fn to_rational(x: f64) -> Option<BigRational> {
    if !x.is_finite() {
        return None;
    }
    if x == 0.0 {
        return Some(BigRational::zero());
    }
    let text = format!("{x:e}");
    let (mantissa, exponent) = text.split_once('e')?;
    let exponent: i32 = exponent.parse().ok()?;
    let (negative, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    let digits: BigInt = format!("{int_part}{frac_part}").parse().ok()?;
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let scale = num_traits::pow(ten, shift.unsigned_abs() as usize);
    let mut r = if shift >= 0 {
        BigRational::from_integer(digits * scale)
    } else {
        BigRational::new(digits, scale)
    };
    if negative {
        r = -r;
    }
    Some(r)
}

/// `a / b` evaluated exactly on the decimal readings of both inputs.
/// Falls back to the float quotient when either input is not finite or `b`
/// is zero.
pub fn quotient(a: f64, b: f64) -> f64 {
    match (to_rational(a), to_rational(b)) {
        (Some(ra), Some(rb)) if !rb.is_zero() => (ra / rb).to_f64().unwrap_or(a / b),
        _ => a / b,
    }
}

/// `a · b` on the decimal readings of both inputs.
pub fn product(a: f64, b: f64) -> f64 {
    match (to_rational(a), to_rational(b)) {
        (Some(ra), Some(rb)) => (ra * rb).to_f64().unwrap_or(a * b),
        _ => a * b,
    }
}
