//! Exact rational scalars.
//!
//! All arithmetic in this crate happens over `ℚ` via [`num::BigRational`].
//! This module adds the small amount of convenience the rest of the code
//! needs: integer/fraction constructors, parsing and printing in the `p/q`
//! form used by the CLI document formats, and integer powers of −1.

use num::bigint::BigInt;
use num::BigRational;
use thiserror::Error;

/// The scalar type of the whole crate: an arbitrary-precision rational.
pub type Rat = BigRational;

/// The rational `n/1`.
///
/// # Example
/// ```
/// use superpair_core::rat::{rat, ratio};
/// assert_eq!(rat(6) / rat(4), ratio(3, 2));
/// ```
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// The rational `n/d` in lowest terms.
///
/// # Panics
/// Panics if `d == 0`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// `(-1)^k` as a rational, for ℤ₂-graded sign bookkeeping.
pub fn sign_pow(k: u32) -> Rat {
    if k % 2 == 0 {
        rat(1)
    } else {
        rat(-1)
    }
}

/// Error produced when a `p/q` string cannot be read as a rational.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum RatParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("malformed rational literal {0:?}")]
    Malformed(String),
    #[error("zero denominator in rational literal {0:?}")]
    ZeroDenominator(String),
}

/// Parses `"p"` or `"p/q"` (optionally signed) into a rational.
///
/// # Example
/// ```
/// use superpair_core::rat::{parse_rat, ratio};
/// assert_eq!(parse_rat("-3/4").unwrap(), ratio(-3, 4));
/// assert_eq!(parse_rat("7").unwrap(), ratio(7, 1));
/// ```
pub fn parse_rat(s: &str) -> Result<Rat, RatParseError> {
    let s = s.trim();
    if s.is_empty() {
        return Err(RatParseError::Empty);
    }
    let malformed = || RatParseError::Malformed(s.to_string());
    match s.split_once('/') {
        None => {
            let n: BigInt = s.parse().map_err(|_| malformed())?;
            Ok(Rat::from_integer(n))
        }
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().map_err(|_| malformed())?;
            let q: BigInt = q.trim().parse().map_err(|_| malformed())?;
            if q == BigInt::from(0) {
                return Err(RatParseError::ZeroDenominator(s.to_string()));
            }
            Ok(Rat::new(p, q))
        }
    }
}

/// Formats a rational as `"p"` or `"p/q"`, the inverse of [`parse_rat`].
pub fn format_rat(r: &Rat) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for s in ["0", "5", "-5", "3/4", "-3/4", "22/7"] {
            let r = parse_rat(s).unwrap();
            assert_eq!(format_rat(&r), s);
        }
    }

    #[test]
    fn parse_normalizes() {
        assert_eq!(parse_rat("4/8").unwrap(), ratio(1, 2));
        assert_eq!(parse_rat("3/-6").unwrap(), ratio(-1, 2));
        assert_eq!(format_rat(&parse_rat("3/-6").unwrap()), "-1/2");
    }

    #[test]
    fn parse_rejects_junk() {
        assert_eq!(parse_rat(""), Err(RatParseError::Empty));
        assert!(matches!(parse_rat("a/b"), Err(RatParseError::Malformed(_))));
        assert!(matches!(
            parse_rat("1/0"),
            Err(RatParseError::ZeroDenominator(_))
        ));
    }

    #[test]
    fn sign_pow_alternates() {
        assert_eq!(sign_pow(0), rat(1));
        assert_eq!(sign_pow(1), rat(-1));
        assert_eq!(sign_pow(2), rat(1));
    }
}
