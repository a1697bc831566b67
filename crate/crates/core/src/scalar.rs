//! Exact rational scalars.

use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{DeformError, Result};

/// Arbitrary-precision rational, always kept reduced with positive denominator.
pub type Scalar = BigRational;

pub fn int(n: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(n))
}

pub fn frac(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

/// Parses an integer or `p/q`.
pub fn parse_rational(text: &str) -> Result<Scalar> {
    let t = text.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), Some(d.trim())),
        None => (t, None),
    };
    let parse_int = |s: &str| -> Result<BigInt> {
        let digits = s.strip_prefix(['-', '+']).unwrap_or(s);
        if digits.is_empty() || !digits.bytes().all(|c| c.is_ascii_digit()) {
            return Err(DeformError::MalformedRational(text.to_string()));
        }
        BigInt::from_str(s).map_err(|_| DeformError::MalformedRational(text.to_string()))
    };
    let n = parse_int(num)?;
    let d = match den {
        Some(d) => parse_int(d)?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(DeformError::ZeroDenominator(text.to_string()));
    }
    Ok(Scalar::new(n, d))
}

/// Canonical `p/q` rendering used in reports; integers keep the `/1`.
pub fn canonical(s: &Scalar) -> String {
    format!("{}/{}", s.numer(), s.denom())
}

/// Compact rendering: `p` for integers, `p/q` otherwise.
pub fn compact(s: &Scalar) -> String {
    if s.is_integer() {
        s.numer().to_string()
    } else {
        format!("{}/{}", s.numer(), s.denom())
    }
}
