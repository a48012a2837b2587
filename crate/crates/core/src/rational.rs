//! Exact rational helpers shared by the game model and the text formats.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

pub fn ratio(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// Parses `p/q` or a bare integer. The denominator must be positive.
pub fn parse_rational(text: &str) -> Option<Rational> {
    let text = text.trim();
    match text.split_once('/') {
        None => text.parse::<BigInt>().ok().map(Rational::from_integer),
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if !q.is_positive() {
                return None;
            }
            Some(Rational::new(p, q))
        }
    }
}

/// Lowest-terms rendering: `p/q`, or `p` for integers.
pub fn format_rational(value: &Rational) -> String {
    if value.denom().is_one() {
        value.numer().to_string()
    } else {
        format!("{}/{}", value.numer(), value.denom())
    }
}

/// `base^exp` for a possibly negative exponent. `base` must be non-zero when `exp < 0`.
pub fn pow(base: &Rational, exp: i32) -> Rational {
    if exp >= 0 {
        num_traits::pow(base.clone(), exp as usize)
    } else {
        debug_assert!(!base.is_zero());
        num_traits::pow(base.recip(), exp.unsigned_abs() as usize)
    }
}

pub(crate) fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}
