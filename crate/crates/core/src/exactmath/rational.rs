use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses an exact rational literal: `p`, `-p` or `p/q` in decimal digits.
///
/// Decimal points, exponents and whitespace are rejected so that no
/// floating-point value can slip into a computation.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let bad = |why: &str| Error::Validation(format!("invalid rational {text:?}: {why}"));
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (text, None),
    };
    let numerator = parse_integer_digits(num, true).ok_or_else(|| {
        if text.contains('.') || text.contains('e') || text.contains('E') {
            bad("floating-point literals are not allowed")
        } else {
            bad("malformed numerator")
        }
    })?;
    let denominator = match den {
        None => BigInt::one(),
        Some(d) => parse_integer_digits(d, false).ok_or_else(|| bad("malformed denominator"))?,
    };
    if denominator.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(numerator, denominator))
}

/// Parses a decimal integer literal with optional leading `-`.
pub fn parse_integer(text: &str) -> Result<BigInt> {
    parse_integer_digits(text, true)
        .ok_or_else(|| Error::Validation(format!("invalid integer {text:?}")))
}

fn parse_integer_digits(text: &str, allow_sign: bool) -> Option<BigInt> {
    let digits = match text.strip_prefix('-') {
        Some(rest) if allow_sign => rest,
        Some(_) => return None,
        None => text,
    };
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    text.parse().ok()
}

pub fn format_rational(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Least common multiple of the denominators.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, q| acc.lcm(q.denom()))
}

/// Scales a rational vector to a primitive integer vector with the same
/// direction (first nonzero sign preserved). The zero vector maps to zeros.
pub fn primitive_integer_vector(v: &[Rational]) -> Vec<BigInt> {
    let den = common_denominator(v);
    let ints: Vec<BigInt> = v.iter().map(|q| q.numer() * (&den / q.denom())).collect();
    let g = ints.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if g.is_zero() {
        return ints;
    }
    ints.into_iter().map(|x| x / &g).collect()
}

pub fn to_i128(q: &Rational) -> Option<i128> {
    if !q.is_integer() {
        return None;
    }
    i128::try_from(q.numer()).ok()
}

pub(crate) fn sign_of(q: &Rational) -> i8 {
    if q.is_positive() {
        1
    } else if q.is_negative() {
        -1
    } else {
        0
    }
}
