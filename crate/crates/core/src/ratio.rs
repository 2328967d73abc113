//! Exact rational plumbing: parsing `p/q` strings and a few comparison
//! helpers shared by the graph and game modules.
//!
//! All theorem-relevant parameters (expansion factors, epsilon, coefficients)
//! travel as [`BigRational`]. Floats are never accepted.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatioParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("invalid rational literal {0:?} (expected integer or p/q)")]
    Invalid(String),
    #[error("zero denominator in {0:?}")]
    ZeroDenominator(String),
}

/// Parse an exact rational from `"p"` or `"p/q"` (optional leading `-`).
///
/// Decimal notation is rejected: `"0.5"` is an error, `"1/2"` is not.
pub fn parse_ratio(s: &str) -> Result<BigRational, RatioParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RatioParseError::Empty);
    }
    let parse_int = |t: &str| -> Result<BigInt, RatioParseError> {
        t.parse::<BigInt>().map_err(|_| RatioParseError::Invalid(s.to_string()))
    };
    match s.split_once('/') {
        None => Ok(BigRational::from_integer(parse_int(s)?)),
        Some((num, den)) => {
            let num = parse_int(num)?;
            let den = parse_int(den)?;
            if den.is_zero() {
                return Err(RatioParseError::ZeroDenominator(s.to_string()));
            }
            Ok(BigRational::new(num, den))
        }
    }
}

/// Render a rational as `"p"` (integral) or `"p/q"` (reduced, q > 0).
pub fn format_ratio(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact rational from an unsigned count.
pub fn ratio_from_usize(n: usize) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `ceil(r)` as a `BigInt`.
pub fn ceil(r: &BigRational) -> BigInt {
    r.ceil().to_integer()
}

/// True iff `r > 0`.
pub fn is_positive(r: &BigRational) -> bool {
    r.is_positive()
}
