//! Exact rational arithmetic helpers.
//!
//! All quantities in this crate are `BigRational`s kept in lowest terms with
//! a positive denominator (the `num-rational` representation). This module
//! adds the canonical string format `"num/den"` (the `/den` part omitted for
//! integers) and the handful of power-of-two primitives the rounding scheme
//! needs: exact `2^e` for signed `e` and exact binary logarithm brackets.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Shorthand constructor used pervasively in tests: `rat(3, 4)` is 3/4.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Canonical string form: `"7/2"`, `"5"`, `"-3/4"`, `"0"`.
pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses the canonical form. Whitespace is not accepted; the denominator,
/// when present, must be positive and nonzero.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let bad = || Error::Parse(format!("invalid rational {:?}", s));
    let (num_s, den_s) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let num: BigInt = num_s.parse().map_err(|_| bad())?;
    let den: BigInt = match den_s {
        Some(d) => d.parse().map_err(|_| bad())?,
        None => BigInt::one(),
    };
    if den <= BigInt::zero() {
        return Err(bad());
    }
    Ok(Rational::new(num, den))
}

/// Exact `2^e` for any signed exponent.
pub fn pow2(e: i64) -> Rational {
    if e >= 0 {
        Rational::from_integer(BigInt::one() << e as usize)
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    }
}

/// Largest integer `e` with `2^e <= r`. Requires `r > 0`.
pub fn floor_log2(r: &Rational) -> Result<i64> {
    if !r.is_positive() {
        return Err(Error::BadParameter(format!(
            "floor_log2 needs a positive argument, got {}",
            format_rational(r)
        )));
    }
    // 2^(bits(n)-1) <= n < 2^bits(n) brackets the true value within one.
    let candidate = r.numer().bits() as i64 - r.denom().bits() as i64;
    let e = if *r >= pow2(candidate) { candidate } else { candidate - 1 };
    debug_assert!(pow2(e) <= *r && *r < pow2(e + 1));
    Ok(e)
}

/// Smallest integer `e` with `2^e >= r`. Requires `r > 0`.
pub fn ceil_log2(r: &Rational) -> Result<i64> {
    let e = floor_log2(r)?;
    Ok(if pow2(e) == *r { e } else { e + 1 })
}

/// Floor of a rational as a big integer.
pub fn floor(r: &Rational) -> BigInt {
    r.numer().div_floor(r.denom())
}

/// True when `r` is non-negative and has an integer value.
pub fn is_integer(r: &Rational) -> bool {
    r.denom().is_one()
}

/// Checks that epsilon is a unit fraction `1/q` with an integer `q >= 2`,
/// i.e. `0 < eps < 1` and `1/eps` integral.
pub fn check_epsilon(eps: &Rational) -> Result<()> {
    if eps.is_positive() && *eps < Rational::one() && eps.numer().is_one() {
        Ok(())
    } else {
        Err(Error::BadEpsilon(format_rational(eps)))
    }
}
