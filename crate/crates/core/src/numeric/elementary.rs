//! `exp`, `ln` and the constant `ln 2` on [`BigFloat`].
//!
//! Both functions work internally with 32 guard bits plus whatever the
//! argument reduction costs, and round once at the end, so the returned value
//! is within a couple of units in the last place.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Zero};

use super::BigFloat;
use crate::{Error, Result};

const GUARD: u32 = 32;

/// `ln 2 = 2 * atanh(1/3)`, summed in fixed point.
pub fn ln2(precision: u32) -> BigFloat {
    let w = precision as usize + 16;
    let one = BigInt::one() << w;
    let mut pow = &one / 3u32;
    let mut acc = BigInt::zero();
    let mut k = 0u64;
    while !pow.is_zero() {
        acc += &pow / (2 * k + 1);
        pow /= 9u32;
        k += 1;
    }
    BigFloat::from_parts(acc << 1usize, -(w as i64), precision)
}

pub fn exp(x: &BigFloat) -> Result<BigFloat> {
    let p = x.precision();
    if x.is_zero() {
        return Ok(BigFloat::one(p));
    }
    let xf = x.to_f64();
    if !xf.is_finite() || xf.abs() > 1e15 {
        return Err(Error::Domain(format!("exp argument too large: {}", x.to_sci_string())));
    }
    let n = (xf / std::f64::consts::LN_2).round() as i64;
    let nbits = 64 - n.unsigned_abs().leading_zeros();
    let s = (p as u64).sqrt() as u32 / 2 + 2;
    let w = p + GUARD + s + nbits;

    let l2 = ln2(w + nbits);
    let r = &x.with_precision(w) - &(&BigFloat::from_i64(n, w) * &l2);
    let r = r.with_precision(w).mul_pow2(-(s as i64));

    let mut sum = BigFloat::one(w);
    let mut term = BigFloat::one(w);
    let mut k = 1i64;
    loop {
        term = &(&term * &r) / &BigFloat::from_i64(k, w);
        if term.is_zero() || term.magnitude_exponent() < -(w as i64) {
            break;
        }
        sum = &sum + &term;
        k += 1;
    }
    for _ in 0..s {
        sum = sum.square();
    }
    Ok(sum.mul_pow2(n).with_precision(p))
}

pub fn ln(x: &BigFloat) -> Result<BigFloat> {
    let p = x.precision();
    if x.is_zero() || x.is_negative() {
        return Err(Error::Domain(format!("ln of non-positive value {}", x.to_sci_string())));
    }
    // x = m * 2^e with m in [3/4, 3/2).
    let mut e = x.magnitude_exponent() - 1;
    let mut m = x.mul_pow2(-e);
    if m > BigFloat::from_parts(BigInt::from(3), -1, 8) {
        m = m.mul_pow2(-1);
        e += 1;
    }

    // Extra bits when m is close to 1, so ln m keeps its relative accuracy.
    let dist = &m - &BigFloat::one(m.precision());
    if dist.is_zero() {
        return Ok(if e == 0 {
            BigFloat::zero(p)
        } else {
            (&BigFloat::from_i64(e, p + GUARD) * &ln2(p + GUARD)).with_precision(p)
        });
    }
    let near_one = (-dist.magnitude_exponent()).max(0) as u32;
    let s = (p as u64).sqrt() as u32 / 2 + 2;
    let w = p + GUARD + s + near_one;

    let mut y = m.with_precision(w);
    for _ in 0..s {
        y = y.sqrt()?;
    }
    let one = BigFloat::one(w);
    let t = &(&y - &one) / &(&y + &one);
    let t2 = t.square();
    let mut sum = t.clone();
    let mut power = t;
    let mut k = 1i64;
    loop {
        power = &power * &t2;
        let term = &power / &BigFloat::from_i64(2 * k + 1, w);
        if term.is_zero() || term.magnitude_exponent() < sum.magnitude_exponent() - w as i64 {
            break;
        }
        sum = &sum + &term;
        k += 1;
    }
    let ln_m = sum.mul_pow2(s as i64 + 1);
    let total = if e == 0 {
        ln_m
    } else {
        let ebits = 64 - e.unsigned_abs().leading_zeros();
        &ln_m + &(&BigFloat::from_i64(e, w + ebits) * &ln2(w + ebits))
    };
    Ok(total.with_precision(p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn close(a: &BigFloat, b: &BigFloat, bits: i64) -> bool {
        let diff = (a - b).abs();
        diff.is_zero() || diff.magnitude_exponent() <= b.magnitude_exponent() - bits
    }

    #[test]
    fn ln2_digits() {
        assert_eq!(
            ln2(200).to_decimal_string(30),
            "0.693147180559945309417232121458"
        );
    }

    #[test]
    fn exp_ln_roundtrip() {
        let p = 300;
        let one = BigFloat::one(p);
        let e = exp(&one).unwrap();
        assert_eq!(e.to_decimal_string(25), "2.7182818284590452353602874");
        assert!(close(&ln(&e).unwrap(), &one, p as i64 - 4));
        let x = BigFloat::from_rational(&rat(-1234, 7), p);
        assert!(close(&ln(&exp(&x).unwrap()).unwrap(), &x, p as i64 - 12));
    }

    #[test]
    fn ln_near_one_keeps_relative_accuracy() {
        let p = 128;
        let eps = BigFloat::one(p).mul_pow2(-90);
        let x = &BigFloat::one(p) + &eps;
        let l = ln(&x).unwrap();
        // ln(1 + eps) = eps - eps^2/2 + ...
        assert!(close(&l, &eps, 80));
        assert!(ln(&BigFloat::from_i64(0, p)).is_err());
        assert!(ln(&BigFloat::from_i64(-3, p)).is_err());
    }

    #[test]
    fn ln_of_power_of_two() {
        let p = 150;
        let l = ln(&BigFloat::from_i64(1024, p)).unwrap();
        let want = &BigFloat::from_i64(10, p) * &ln2(p);
        assert!(close(&l, &want, p as i64 - 4));
    }
}
