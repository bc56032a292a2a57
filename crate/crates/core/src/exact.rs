//! Exact integer helpers for integral exponents.

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{Float, ToPrimitive, Zero};

use crate::error::{domain, Error, Result};

/// Returns `Some(e)` when `v` is a (reasonably small) positive integer.
pub fn integral_exponent(v: f64) -> Option<u32> {
    if v.is_finite() && v >= 1.0 && v <= 64.0 && v.fract() == 0.0 {
        Some(v as u32)
    } else {
        None
    }
}

/// `floor(x^e)` computed exactly from the binary expansion of `x`.
pub fn floor_pow(x: f64, e: u32) -> Result<u128> {
    if !x.is_finite() || x < 0.0 {
        return Err(domain(format!("expected finite x >= 0, got {x}")));
    }
    if x == 0.0 {
        return Ok(if e == 0 { 1 } else { 0 });
    }
    let (mant, exp, _) = x.integer_decode();
    let big = BigUint::from(mant).pow(e);
    let shift = exp as i64 * e as i64;
    let v = if shift >= 0 { big << (shift as u64) } else { big >> ((-shift) as u64) };
    v.to_u128().ok_or_else(|| Error::Overflow(format!("floor({x}^{e}) exceeds 128 bits")))
}

/// `floor(x)` as an integer.
pub fn floor_u128(x: f64) -> Result<u128> {
    floor_pow(x, 1)
}

pub fn checked_pow(n: u128, e: u32) -> Result<u128> {
    n.checked_pow(e).ok_or_else(|| Error::Overflow(format!("{n}^{e} exceeds 128 bits")))
}

/// Largest `r` with `r^e <= v`.
pub fn iroot_floor(v: u128, e: u32) -> u128 {
    assert!(e >= 1);
    if e == 1 || v < 2 {
        return v;
    }
    let mut r = (v as f64).powf(1.0 / e as f64) as u128;
    while r > 0 && r.checked_pow(e).is_none_or(|p| p > v) {
        r -= 1;
    }
    while (r + 1).checked_pow(e).is_some_and(|p| p <= v) {
        r += 1;
    }
    r
}

/// `0^e, 1^e, ..., r^e`.
pub fn power_table(r: u128, e: u32) -> Result<Vec<u128>> {
    (0..=r).map(|n| checked_pow(n, e)).collect()
}

/// Exact comparison of `a^k + b^k` with `w` when `2k` is an integer.
///
/// With `A = a^(2k)`, `B = b^(2k)` the left side is `sqrt(A) + sqrt(B)`;
/// one squaring reduces the question to `4AB` against `(w^2 - A - B)^2`.
/// Returns `None` for other exponents.
pub fn half_power_cmp(k: f64, a: u64, b: u64, w: f64) -> Option<Ordering> {
    let p = integral_exponent(2.0 * k)?;
    let w = BigRational::from_float(w)?;
    if w < BigRational::zero() {
        return Some(Ordering::Greater);
    }
    let big_a = BigInt::from(a).pow(p);
    let big_b = BigInt::from(b).pow(p);
    let s = &w * &w - BigRational::from_integer(&big_a + &big_b);
    if s < BigRational::zero() {
        return Some(Ordering::Greater);
    }
    let four_ab = BigRational::from_integer(BigInt::from(4) * big_a * big_b);
    Some(four_ab.cmp(&(&s * &s)))
}
