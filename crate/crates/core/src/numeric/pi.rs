//! Reference value of pi from Machin's arctangent formula.
//!
//! `pi = 16 atan(1/5) - 4 atan(1/239)`, each arctangent summed exactly by
//! binary splitting. None of the series certified elsewhere in the crate are
//! involved, so this is an independent oracle.

use num_bigint::BigInt;
use num_traits::One;

use super::BigFloat;

struct Split {
    p: BigInt,
    q: BigInt,
    b: BigInt,
    t: BigInt,
}

/// `sum_{k in [lo, hi)} (-1)^k / ((2k+1) m^(2k+1))` as `T / (B Q)`.
fn split(m: &BigInt, m2: &BigInt, lo: u64, hi: u64) -> Split {
    if hi - lo == 1 {
        let (p, q) = if lo == 0 {
            (BigInt::one(), m.clone())
        } else {
            (-BigInt::one(), m2.clone())
        };
        let t = p.clone();
        return Split { p, q, b: BigInt::from(2 * lo + 1), t };
    }
    let mid = lo + (hi - lo) / 2;
    let (l, r) = crate::par::join(|| split(m, m2, lo, mid), || split(m, m2, mid, hi));
    Split {
        t: &r.b * &r.q * &l.t + &l.b * &l.p * &r.t,
        p: l.p * r.p,
        q: l.q * r.q,
        b: l.b * r.b,
    }
}

/// `atan(1/m)` for an integer `m >= 2`.
pub fn arctan_inv(m: u64, precision: u32) -> BigFloat {
    assert!(m >= 2, "arctan_inv needs m >= 2");
    let w = precision + 16;
    let bits_per_term = 2.0 * (m as f64).log2();
    let terms = (w as f64 / bits_per_term).ceil() as u64 + 2;
    let mb = BigInt::from(m);
    let s = split(&mb, &(&mb * &mb), 0, terms);
    let t = BigFloat::from_bigint(s.t, w);
    let den = BigFloat::from_bigint(s.b * s.q, w);
    (&t / &den).with_precision(precision)
}

/// pi with absolute error at most `2^(4 - precision)`.
pub fn pi_reference(precision: u32) -> BigFloat {
    let w = precision.max(64) + 8;
    let a = arctan_inv(5, w).mul_pow2(4);
    let b = arctan_inv(239, w).mul_pow2(2);
    (&a - &b).with_precision(precision)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twenty_digits() {
        assert_eq!(pi_reference(96).to_decimal_string(19), "3.1415926535897932384");
    }

    #[test]
    fn atan_of_one_third_plus_half_is_quarter_pi() {
        // atan(1/2) + atan(1/3) = pi/4
        let p = 256;
        let s = &arctan_inv(2, p) + &arctan_inv(3, p);
        let diff = (&s.mul_pow2(2) - &pi_reference(p)).abs();
        assert!(diff.is_zero() || diff.magnitude_exponent() < -(p as i64) + 6);
    }
}
