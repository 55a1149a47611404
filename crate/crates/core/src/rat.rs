//! Exact rational arithmetic helpers.
//!
//! All weights, bounds, and approximation factors are arbitrary-precision
//! rationals so that the ceiling operations of the scaling transform are
//! bit-exact. Binary floating point never enters any computation.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number.
pub type Rat = BigRational;

/// Shorthand for `n/d` used heavily in tests and fixtures.
pub fn rat(numer: i64, denom: i64) -> Rat {
    Rat::new(BigInt::from(numer), BigInt::from(denom))
}

/// Shorthand for an integer rational.
pub fn rat_int(value: i64) -> Rat {
    Rat::from_integer(BigInt::from(value))
}

/// Parses `123`, `-4`, `3.25`, or `2/3` into an exact rational.
pub fn parse_rat(text: &str) -> std::result::Result<Rat, String> {
    let text = text.trim();
    if text.is_empty() {
        return Err("empty number".to_string());
    }
    if let Some((numer, denom)) = text.split_once('/') {
        let numer: BigInt = numer
            .parse()
            .map_err(|_| format!("bad numerator in '{text}'"))?;
        let denom: BigInt = denom
            .parse()
            .map_err(|_| format!("bad denominator in '{text}'"))?;
        if denom.is_zero() {
            return Err(format!("zero denominator in '{text}'"));
        }
        return Ok(Rat::new(numer, denom));
    }
    if let Some((int_part, frac_part)) = text.split_once('.') {
        if frac_part.is_empty() || !frac_part.bytes().all(|b| b.is_ascii_digit()) {
            return Err(format!("bad decimal '{text}'"));
        }
        let negative = int_part.starts_with('-');
        let int_part = if int_part.is_empty() || int_part == "-" {
            "0"
        } else {
            int_part
        };
        let whole: BigInt = int_part
            .parse()
            .map_err(|_| format!("bad decimal '{text}'"))?;
        let frac: BigInt = frac_part
            .parse()
            .map_err(|_| format!("bad decimal '{text}'"))?;
        let scale = BigInt::from(10u32).pow(frac_part.len() as u32);
        let frac = if negative { -frac } else { frac };
        return Ok(Rat::new(whole * &scale + frac, scale));
    }
    let value: BigInt = text.parse().map_err(|_| format!("bad number '{text}'"))?;
    Ok(Rat::from_integer(value))
}

/// Canonical text form: reduced, `N` when integral, `N/D` otherwise.
pub fn format_rat(value: &Rat) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// Smallest integer at or above `value`, as `u64`.
///
/// Negative values are rejected as invalid parameters; values whose ceiling
/// exceeds the 64-bit range produce a capacity error naming `context`.
pub fn ceil_to_u64(value: &Rat, context: &str) -> Result<u64> {
    if value.is_negative() {
        return Err(Error::InvalidParameter(format!(
            "{context} must be non-negative, got {}",
            format_rat(value)
        )));
    }
    let ceiled: BigInt = value.ceil().to_integer();
    ceiled.to_u64().ok_or_else(|| Error::Capacity {
        required_bits: ceiled.bits(),
        context: context.to_string(),
    })
}
