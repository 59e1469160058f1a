//! Binary floating point with an explicit, per-value precision.
//!
//! A value is `mantissa * 2^exponent` with `|mantissa| < 2^precision`. Every
//! arithmetic result is rounded to nearest at the larger of its operands'
//! precisions, so one operation contributes a relative error of at most
//! `2^(1 - precision)`.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

#[derive(Clone, Debug)]
pub struct BigFloat {
    mantissa: BigInt,
    exponent: i64,
    precision: u32,
}

/// Shift `m` right by `shift` bits, rounding half away from zero.
fn round_shift(m: &BigInt, shift: u64) -> BigInt {
    if shift == 0 {
        return m.clone();
    }
    let mag = m.magnitude();
    let mut q = mag >> shift;
    if mag.bit(shift - 1) {
        q += 1u32;
    }
    BigInt::from_biguint(m.sign(), q)
}

impl BigFloat {
    pub fn zero(precision: u32) -> Self {
        BigFloat {
            mantissa: BigInt::zero(),
            exponent: 0,
            precision: precision.max(2),
        }
    }

    pub fn one(precision: u32) -> Self {
        Self::from_bigint(BigInt::one(), precision)
    }

    /// Builds `mantissa * 2^exponent`, rounded to `precision` bits.
    pub fn from_parts(mantissa: BigInt, exponent: i64, precision: u32) -> Self {
        let mut x = BigFloat {
            mantissa,
            exponent,
            precision: precision.max(2),
        };
        x.normalize();
        x
    }

    pub fn from_bigint(n: BigInt, precision: u32) -> Self {
        Self::from_parts(n, 0, precision)
    }

    pub fn from_i64(n: i64, precision: u32) -> Self {
        Self::from_bigint(BigInt::from(n), precision)
    }

    pub fn from_rational(x: &BigRational, precision: u32) -> Self {
        let num = x.numer();
        let den = x.denom();
        if num.is_zero() {
            return Self::zero(precision);
        }
        // Quotient carries precision + 2 bits before the final rounding.
        let want = precision as i64 + 2;
        let shift = (want + den.bits() as i64 - num.bits() as i64).max(0);
        let q = (num << shift as usize) / den;
        Self::from_parts(q, -shift, precision)
    }

    /// Best-effort conversion from `f64`; exact for every finite input.
    pub fn from_f64(v: f64, precision: u32) -> Self {
        if v == 0.0 || !v.is_finite() {
            return Self::zero(precision);
        }
        let bits = v.to_bits();
        let sign = if bits >> 63 == 1 { -1i64 } else { 1 };
        let exp = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (m, e) = if exp == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp - 1075)
        };
        Self::from_parts(BigInt::from(m) * sign, e, precision)
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exponent = 0;
            return;
        }
        let bits = self.mantissa.bits();
        let prec = self.precision as u64;
        if bits > prec {
            let shift = bits - prec;
            self.mantissa = round_shift(&self.mantissa, shift);
            self.exponent += shift as i64;
            if self.mantissa.bits() > prec {
                self.mantissa >>= 1usize;
                self.exponent += 1;
            }
        }
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Re-rounds (or widens) to `precision` bits.
    pub fn with_precision(&self, precision: u32) -> Self {
        Self::from_parts(self.mantissa.clone(), self.exponent, precision)
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn sign(&self) -> Sign {
        self.mantissa.sign()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn abs(&self) -> Self {
        BigFloat {
            mantissa: self.mantissa.abs(),
            ..self.clone()
        }
    }

    /// Exponent of the leading bit: `2^(e-1) <= |x| < 2^e`. Zero maps to `i64::MIN`.
    pub fn magnitude_exponent(&self) -> i64 {
        if self.is_zero() {
            i64::MIN
        } else {
            self.exponent + self.mantissa.bits() as i64
        }
    }

    /// Exact scaling by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        BigFloat {
            exponent: self.exponent + k,
            ..self.clone()
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        let keep = bits.min(60);
        let m = round_shift(&self.mantissa, (bits - keep) as u64)
            .to_f64()
            .unwrap_or(0.0);
        let e = self.exponent + bits - keep;
        // powi saturates gracefully for the exponent ranges used here.
        if e > 2000 {
            return m.signum() * f64::INFINITY;
        }
        if e < -2000 {
            return 0.0;
        }
        m * 2f64.powi(e as i32)
    }

    /// Exact rational value of this float.
    pub fn to_rational(&self) -> BigRational {
        if self.exponent >= 0 {
            BigRational::from_integer(&self.mantissa << self.exponent as usize)
        } else {
            BigRational::new(
                self.mantissa.clone(),
                BigInt::one() << (-self.exponent) as usize,
            )
        }
    }

    /// `floor(x * 2^bits)` as an integer.
    pub fn floor_scaled_pow2(&self, bits: i64) -> BigInt {
        let e = self.exponent + bits;
        if e >= 0 {
            &self.mantissa << e as usize
        } else {
            self.mantissa.div_floor(&(BigInt::one() << (-e) as usize))
        }
    }

    /// `floor(|x| * 10^digits)`.
    pub fn floor_abs_scaled_pow10(&self, digits: u32) -> BigInt {
        let m = self.mantissa.abs() * num_traits::pow(BigInt::from(10), digits as usize);
        if self.exponent >= 0 {
            m << self.exponent as usize
        } else {
            m >> (-self.exponent) as usize
        }
    }

    /// Decimal rendering truncated (not rounded) after `digits` fractional digits.
    pub fn to_decimal_string(&self, digits: u32) -> String {
        let scaled = self.floor_abs_scaled_pow10(digits).to_string();
        let d = digits as usize;
        let padded = if scaled.len() <= d {
            format!("{}{}", "0".repeat(d + 1 - scaled.len()), scaled)
        } else {
            scaled
        };
        let (int_part, frac_part) = padded.split_at(padded.len() - d);
        let sign = if self.is_negative() { "-" } else { "" };
        if d == 0 {
            format!("{sign}{int_part}")
        } else {
            format!("{sign}{int_part}.{frac_part}")
        }
    }

    /// Short scientific rendering for reports, e.g. `3.2e-105`.
    pub fn to_sci_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        // log10 via the binary exponent keeps this valid far beyond f64 range.
        let e2 = self.magnitude_exponent();
        let top = self.mul_pow2(-e2).to_f64();
        let log10 = (e2 as f64) * std::f64::consts::LOG10_2 + top.abs().log10();
        let exp10 = log10.floor();
        let mant = 10f64.powf(log10 - exp10) * top.signum();
        format!("{mant:.3}e{exp10}")
    }

    /// Base-2 logarithm of `|x|`, approximate; `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let e2 = self.magnitude_exponent();
        e2 as f64 + self.mul_pow2(-e2).to_f64().abs().log2()
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn recip(&self) -> Result<Self> {
        BigFloat::one(self.precision).checked_div(self)
    }

    pub fn checked_div(&self, rhs: &BigFloat) -> Result<Self> {
        if rhs.is_zero() {
            return Err(Error::Domain("division by zero".into()));
        }
        let precision = self.precision.max(rhs.precision);
        if self.is_zero() {
            return Ok(Self::zero(precision));
        }
        let want = precision as i64 + 2;
        let shift = (want + rhs.mantissa.bits() as i64 - self.mantissa.bits() as i64).max(0);
        let q = (&self.mantissa << shift as usize) / &rhs.mantissa;
        Ok(Self::from_parts(
            q,
            self.exponent - shift - rhs.exponent,
            precision,
        ))
    }

    /// Square root; negative input is a [`Error::Domain`].
    pub fn sqrt(&self) -> Result<Self> {
        if self.is_negative() {
            return Err(Error::Domain(format!(
                "sqrt of negative value {}",
                self.to_sci_string()
            )));
        }
        if self.is_zero() {
            return Ok(self.clone());
        }
        let want = 2 * (self.precision as i64 + 2);
        let mut shift = (want - self.mantissa.bits() as i64).max(0);
        if (self.exponent - shift).rem_euclid(2) != 0 {
            shift += 1;
        }
        let root = (&self.mantissa << shift as usize).sqrt();
        Ok(Self::from_parts(
            root,
            (self.exponent - shift) / 2,
            self.precision,
        ))
    }

    /// Integer power by repeated squaring, carried at extra precision.
    pub fn powi(&self, n: i64) -> Result<Self> {
        let guard = 64 - (n.unsigned_abs().leading_zeros()) + 8;
        let work = self.precision + guard;
        let mut base = self.with_precision(work);
        let mut acc = BigFloat::one(work);
        let mut e = n.unsigned_abs();
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        let acc = if n < 0 { acc.recip()? } else { acc };
        Ok(acc.with_precision(self.precision))
    }

    fn add_signed(&self, rhs: &BigFloat, negate_rhs: bool) -> BigFloat {
        let precision = self.precision.max(rhs.precision);
        let rhs_m = if negate_rhs {
            -rhs.mantissa.clone()
        } else {
            rhs.mantissa.clone()
        };
        if rhs.is_zero() {
            return self.with_precision(precision);
        }
        if self.is_zero() {
            return Self::from_parts(rhs_m, rhs.exponent, precision);
        }
        // When one operand sits entirely below the rounding position of the
        // other, keep a sticky contribution instead of materialising the shift.
        let top_a = self.magnitude_exponent();
        let top_b = rhs.magnitude_exponent();
        let gap_limit = precision as i64 + 4;
        if top_a - top_b > gap_limit {
            return self.add_sticky(&rhs_m, precision);
        }
        if top_b - top_a > gap_limit {
            return BigFloat::from_parts(rhs_m, rhs.exponent, precision)
                .add_sticky(&self.mantissa, precision);
        }
        let e = self.exponent.min(rhs.exponent);
        let a = &self.mantissa << (self.exponent - e) as usize;
        let b = rhs_m << (rhs.exponent - e) as usize;
        Self::from_parts(a + b, e, precision)
    }

    fn add_sticky(&self, tiny: &BigInt, precision: u32) -> BigFloat {
        // Shift the large operand down to precision + 4 bits, then nudge by
        // one unit in the direction of the tiny operand.
        let a = self.with_precision(precision + 4);
        let bump = tiny.signum();
        let shift = (precision as i64 + 8) - a.mantissa.bits() as i64;
        let m = (&a.mantissa << shift.max(0) as usize) + bump;
        Self::from_parts(m, a.exponent - shift.max(0), precision)
    }
}

impl PartialEq for BigFloat {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl BigFloat {
    /// Total order on values (precision is ignored).
    pub fn cmp_value(&self, other: &BigFloat) -> Ordering {
        let sa = self.mantissa.sign();
        let sb = other.mantissa.sign();
        if sa != sb {
            let rank = |s: Sign| match s {
                Sign::Minus => 0,
                Sign::NoSign => 1,
                Sign::Plus => 2,
            };
            return rank(sa).cmp(&rank(sb));
        }
        if self.is_zero() {
            return Ordering::Equal;
        }
        let e = self.exponent.min(other.exponent);
        let a = &self.mantissa << (self.exponent - e) as usize;
        let b = &other.mantissa << (other.exponent - e) as usize;
        a.cmp(&b)
    }
}

impl PartialOrd for BigFloat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl Add for &BigFloat {
    type Output = BigFloat;
    fn add(self, rhs: &BigFloat) -> BigFloat {
        self.add_signed(rhs, false)
    }
}

impl Sub for &BigFloat {
    type Output = BigFloat;
    fn sub(self, rhs: &BigFloat) -> BigFloat {
        self.add_signed(rhs, true)
    }
}

impl Mul for &BigFloat {
    type Output = BigFloat;
    fn mul(self, rhs: &BigFloat) -> BigFloat {
        BigFloat::from_parts(
            &self.mantissa * &rhs.mantissa,
            self.exponent + rhs.exponent,
            self.precision.max(rhs.precision),
        )
    }
}

/// Panics on division by zero, like integer division; use
/// [`BigFloat::checked_div`] where the divisor may vanish.
impl Div for &BigFloat {
    type Output = BigFloat;
    fn div(self, rhs: &BigFloat) -> BigFloat {
        self.checked_div(rhs).expect("BigFloat division by zero")
    }
}

impl Neg for &BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        BigFloat {
            mantissa: -self.mantissa.clone(),
            ..self.clone()
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr for BigFloat {
            type Output = BigFloat;
            fn $m(self, rhs: BigFloat) -> BigFloat { (&self).$m(&rhs) }
        }
        impl $tr<&BigFloat> for BigFloat {
            type Output = BigFloat;
            fn $m(self, rhs: &BigFloat) -> BigFloat { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);

impl Neg for BigFloat {
    type Output = BigFloat;
    fn neg(self) -> BigFloat {
        -&self
    }
}

impl fmt::Display for BigFloat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f
            .precision()
            .unwrap_or(((self.precision as f64) * std::f64::consts::LOG10_2) as usize);
        write!(f, "{}", self.to_decimal_string(digits as u32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn rational_roundtrip_is_close() {
        let x = BigFloat::from_rational(&rat(1, 3), 100);
        let back = x.to_rational();
        let err = (back - rat(1, 3)) * rat(3, 1);
        let bound = BigRational::new(BigInt::one(), BigInt::one() << 99usize);
        assert!(err.abs() <= bound);
    }

    #[test]
    fn sqrt_of_four_is_two() {
        let x = BigFloat::from_i64(4, 64).sqrt().unwrap();
        assert_eq!(x, BigFloat::from_i64(2, 64));
        assert!(BigFloat::from_i64(-4, 64).sqrt().is_err());
    }

    #[test]
    fn sqrt_two_squared() {
        let p = 256;
        let s = BigFloat::from_i64(2, p).sqrt().unwrap();
        let err = (&s.square() - &BigFloat::from_i64(2, p)).abs();
        assert!(err.log2_abs() < -(p as f64) + 4.0);
    }

    #[test]
    fn decimal_rendering() {
        let x = BigFloat::from_rational(&rat(-22, 7), 80);
        assert_eq!(x.to_decimal_string(6), "-3.142857");
        assert_eq!(BigFloat::from_rational(&rat(1, 8), 10).to_decimal_string(2), "0.12");
        assert_eq!(format!("{:.3}", BigFloat::from_i64(5, 20)), "5.000");
    }

    #[test]
    fn far_apart_addition_keeps_large_operand() {
        let big = BigFloat::from_i64(1, 64);
        let tiny = BigFloat::from_i64(1, 64).mul_pow2(-500);
        assert_eq!((&big + &tiny).with_precision(64), big);
        assert_eq!(&big - &tiny, big);
        let wide = BigFloat::from_i64(1, 600);
        assert!((&wide - &tiny) < wide);
    }

    #[test]
    fn powi_negative() {
        let x = BigFloat::from_i64(2, 64).powi(-3).unwrap();
        assert_eq!(x, BigFloat::from_rational(&rat(1, 8), 64));
    }

    #[test]
    fn f64_conversions() {
        let x = BigFloat::from_f64(0.1, 53);
        assert_eq!(x.to_f64(), 0.1);
        assert!((BigFloat::from_rational(&rat(2, 3), 80).to_f64() - 2.0 / 3.0).abs() < 1e-15);
    }
}
