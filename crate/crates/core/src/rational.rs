//! Exact scalars.
//!
//! [`Rational`] is `num_rational::BigRational`: arbitrary precision, always
//! stored in lowest terms with a positive denominator.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use std::str::FromStr;

pub type Rational = num_rational::BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// Parses `"3"`, `"-3"`, `"2/3"` or `"-2/3"`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(num).ok()?;
    let d = BigInt::from_str(den).ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

pub fn to_f64(r: &Rational) -> f64 {
    // numerator/denominator may individually overflow f64 for huge values
    match (r.numer().to_f64(), r.denom().to_f64()) {
        (Some(n), Some(d)) if n.is_finite() && d.is_finite() => n / d,
        _ => r.to_f64().unwrap_or(f64::NAN),
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Uniform draw of `a/b` with `a ∈ [-max_num, max_num] \ {0}` and `b ∈ [1, max_den]`.
pub fn random_nonzero_rational<R: Rng + ?Sized>(rng: &mut R, max_num: i64, max_den: i64) -> Rational {
    let a = loop {
        let a = rng.gen_range(-max_num..=max_num);
        if a != 0 {
            break a;
        }
    };
    let b = rng.gen_range(1..=max_den);
    ratio(a, b)
}

pub fn abs(r: &Rational) -> Rational {
    r.abs()
}

/// Integer power with possibly negative exponent. `None` for `0^negative`.
pub fn pow_int(base: &Rational, exp: i64) -> Option<Rational> {
    if exp >= 0 {
        Some(num_traits::pow::pow(base.clone(), exp as usize))
    } else if base.is_zero() {
        None
    } else {
        Some(num_traits::pow::pow(base.recip(), exp.unsigned_abs() as usize))
    }
}
