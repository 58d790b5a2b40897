//! Arbitrary-precision rational scalars and their text form.
//!
//! All coordinates in the engine are reduced fractions `p/q` with `q > 0`;
//! integers print without the `/1` suffix.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

pub type Rat = BigRational;

/// Rational from a small numerator/denominator pair. Panics on `d == 0`.
pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(BigInt::from(n), BigInt::from(d))
}

/// Rational from an integer.
pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(BigInt::from(n))
}

/// Parse `"p/q"` or `"p"`; the denominator must be nonzero.
pub fn parse_rat(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::ParseError(format!("invalid rational literal {s:?}"));
    match s.split_once('/') {
        Some((num, den)) => {
            let num = BigInt::from_str(num.trim()).map_err(|_| bad())?;
            let den = BigInt::from_str(den.trim()).map_err(|_| bad())?;
            if den.is_zero() {
                return Err(Error::ParseError(format!("zero denominator in {s:?}")));
            }
            Ok(Rat::new(num, den))
        }
        None => {
            let num = BigInt::from_str(s).map_err(|_| bad())?;
            Ok(Rat::from_integer(num))
        }
    }
}

/// Canonical text form: `"p/q"`, or `"p"` when the value is an integer.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact midpoint of two rationals.
pub fn midpoint(a: &Rat, b: &Rat) -> Rat {
    (a + b) / rat_int(2)
}

pub fn abs(r: &Rat) -> Rat {
    r.abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format_round_trip() {
        for text in ["0", "7", "-3", "1/2", "-5/3", "17/10"] {
            let r = parse_rat(text).unwrap();
            assert_eq!(fmt_rat(&r), text);
        }
        assert_eq!(fmt_rat(&parse_rat("2/4").unwrap()), "1/2");
        assert_eq!(fmt_rat(&parse_rat("3/-6").unwrap()), "-1/2");
        assert_eq!(fmt_rat(&parse_rat(" 4 / 2 ").unwrap()), "2");
        assert!(parse_rat("1/0").is_err());
        assert!(parse_rat("a/b").is_err());
    }

    #[test]
    fn midpoint_is_exact() {
        assert_eq!(midpoint(&rat(1, 3), &rat(1, 2)), rat(5, 12));
    }
}
