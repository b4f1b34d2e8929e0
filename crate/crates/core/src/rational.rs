//! Exact rational scalars. Every probability, weight and variable value in
//! this crate is a [`Rational`]; nothing is ever rounded.

use num_bigint::BigInt;

/// Arbitrary-precision rational number.
pub type Rational = num_rational::BigRational;

/// Shorthand constructor, mostly for fixtures and tests: `rat(1, 2)` is 1/2.
///
/// Panics if `denom` is zero.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

/// The rational `n/1`.
pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
