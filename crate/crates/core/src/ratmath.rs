//! Exact arithmetic primitives.
//!
//! Every bound in this crate is carried as a [`Rational`] (an arbitrary
//! precision, always-reduced fraction). The only irrational quantity the
//! bound engine needs is `floor((K - sqrt(D)) / 2)`, which is evaluated with
//! integer arithmetic alone by [`floor_half_diff`].

use num_bigint::{BigInt, BigUint};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exact rational number. Serializes as `p/q`, or `p` when `q = 1`.
pub type Rational = num_rational::BigRational;

/// Shorthand for `num / den`.
///
/// # Panics
/// Panics if `den == 0`.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Parses `p/q` or `p`. Decimal notation is rejected so that every value
/// entering the bound engine is exact.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = |msg: &str| Error::Parse { line: 0, msg: format!("{msg}: {text:?}") };
    if text.is_empty() {
        return Err(bad("empty rational"));
    }
    if text.contains(['.', 'e', 'E']) {
        return Err(bad("floats are not accepted, write p/q"));
    }
    let (num, den) = match text.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (text, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad("bad numerator"))?;
    let den: BigInt = den.parse().map_err(|_| bad("bad denominator"))?;
    if den.is_zero() {
        return Err(bad("zero denominator"));
    }
    Ok(Rational::new(num, den))
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// `floor(value)` as an `i64`.
pub fn floor_i64(value: &Rational) -> i64 {
    value.floor().to_integer().to_i64().expect("floor out of i64 range")
}

/// `ceil(value)` as an `i64`.
pub fn ceil_i64(value: &Rational) -> i64 {
    value.ceil().to_integer().to_i64().expect("ceil out of i64 range")
}

/// Integer square root: the largest `r` with `r * r <= x`.
pub fn isqrt(x: i64) -> Result<i64> {
    if x < 0 {
        return Err(Error::Domain(format!("isqrt of negative value {x}")));
    }
    let mut r = (x as u64).sqrt() as i64;
    // `Roots::sqrt` is exact, the loops only guard the invariant.
    while r * r > x {
        r -= 1;
    }
    while (r + 1) * (r + 1) <= x {
        r += 1;
    }
    Ok(r)
}

/// Exact `floor((k - sqrt(d)) / 2)`.
///
/// The result `v` is the largest integer with `2v <= k - sqrt(d)`, i.e. with
/// `k - 2v >= 0` and `(k - 2v)^2 >= d`. The candidate from `isqrt` is
/// corrected by that comparison, so no floating point is involved even when
/// `d` is a perfect square.
pub fn floor_half_diff(k: i64, d: i64) -> Result<i64> {
    let r = isqrt(d)?;
    let fits = |v: i64| {
        let gap = k - 2 * v;
        gap >= 0 && gap * gap >= d
    };
    let mut v = Integer::div_floor(&(k - r), &2);
    while !fits(v) {
        v -= 1;
    }
    while fits(v + 1) {
        v += 1;
    }
    Ok(v)
}

/// `floor(scale * base^exp)` for a nonnegative rational exponent, computed
/// exactly as the largest `F` with `F^q <= scale^q * base^p` where `exp = p/q`.
pub fn floor_scaled_power(base: u64, exp: &Rational, scale: u64) -> Result<u64> {
    if exp.is_negative() {
        return Err(Error::Domain(format!("negative exponent {exp}")));
    }
    let p = exp.numer().to_u32().ok_or_else(|| Error::Range(format!("exponent {exp} too large")))?;
    let q = exp.denom().to_u32().ok_or_else(|| Error::Range(format!("exponent {exp} too large")))?;
    let radicand = BigUint::from(scale).pow(q) * BigUint::from(base).pow(p);
    let root = radicand.nth_root(q);
    root.to_u64().ok_or_else(|| Error::Range(format!("{scale}*{base}^{exp} overflows u64")))
}

/// Greatest common divisor helper used by tests and canonicalization checks.
pub fn is_canonical(value: &Rational) -> bool {
    value.denom().is_positive() && value.numer().gcd(value.denom()).is_one()
}
