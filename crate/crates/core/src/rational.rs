//! Exact rational scalars and their textual form.

use alloc::string::{String, ToString};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

/// Arbitrary-precision rational, always kept in lowest terms with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("bad rational literal {literal:?}: {reason}")]
pub struct RationalParseError {
    pub literal: String,
    pub reason: &'static str,
}

/// `n / d` as a [`Rational`]. Panics when `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

fn digits(s: &str) -> bool {
    !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit())
}

/// Parses `"p"`, `"-p"` or `"p/q"` (and `"-p/q"`) with `q > 0`.
///
/// No whitespace, no leading `+`, no sign on the denominator.
pub fn parse_rational(literal: &str) -> Result<Rational, RationalParseError> {
    let fail = |reason| RationalParseError {
        literal: literal.to_string(),
        reason,
    };
    let (negative, body) = match literal.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, literal),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    if !digits(num) {
        return Err(fail("numerator must be a decimal integer"));
    }
    let mut numerator: BigInt = num.parse().map_err(|_| fail("numerator overflow"))?;
    if negative {
        numerator = -numerator;
    }
    let denominator = match den {
        None => BigInt::one(),
        Some(d) => {
            if !digits(d) {
                return Err(fail("denominator must be a positive decimal integer"));
            }
            let d: BigInt = d.parse().map_err(|_| fail("denominator overflow"))?;
            if d.is_zero() {
                return Err(fail("zero denominator"));
            }
            d
        }
    };
    Ok(Rational::new(numerator, denominator))
}

/// Canonical text: `"p"` for integers, `"p/q"` otherwise.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

pub fn min_rational(a: &Rational, b: &Rational) -> Rational {
    if a <= b {
        a.clone()
    } else {
        b.clone()
    }
}

pub fn is_positive(r: &Rational) -> bool {
    r.is_positive()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_accepted_forms() {
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-3").unwrap(), int(-3));
        assert_eq!(parse_rational("7/12").unwrap(), rat(7, 12));
        assert_eq!(parse_rational("-11/96").unwrap(), rat(-11, 96));
        assert_eq!(parse_rational("2/4").unwrap(), rat(1, 2));
    }

    #[test]
    fn rejects_malformed_literals() {
        for bad in ["", "3/0", "+3", " 3", "1/-2", "1/", "/2", "a", "1.5", "--1", "1/2/3"] {
            assert!(parse_rational(bad).is_err(), "{bad:?} accepted");
        }
        assert_eq!(parse_rational("3/0").unwrap_err().reason, "zero denominator");
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(format_rational(&rat(10, 4)), "5/2");
        assert_eq!(format_rational(&rat(-6, 3)), "-2");
        assert_eq!(format_rational(&rat(0, 5)), "0");
    }
}
