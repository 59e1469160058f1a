//! Gamma at positive rational arguments by Spouge's approximation.
//!
//! `Gamma(z+1) = (z+a)^(z+1/2) e^(-(z+a)) [c_0 + sum_{k=1}^{a-1} c_k/(z+k) + eps]`
//! with `c_0 = sqrt(2 pi)` and
//! `c_k = (-1)^(k-1) (a-k)^(k-1/2) e^(a-k) / (k-1)!`.
//! The relative truncation error is below `(2 pi)^-(a+1/2)`, about
//! `2.65 a` bits, so `a = ceil(0.38 p) + 2` covers `p` bits.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::{elementary, pi_reference, BigFloat};
use crate::rational::factorial;
use crate::{Error, Result};

/// Spouge coefficients for one target precision. Building a table is the
/// expensive part, so callers evaluating several Gamma values at the same
/// precision should keep one around.
#[derive(Clone, Debug)]
pub struct SpougeTable {
    precision: u32,
    a: u64,
    work: u32,
    coeffs: Vec<BigFloat>,
}

impl SpougeTable {
    pub fn new(precision: u32) -> Result<Self> {
        // Output carries 8 bits of slack; the guard bits below absorb the
        // cancellation in the coefficient sum, whose largest terms reach
        // about 1.84 a bits.
        let bits = precision as u64 + 8;
        let a = (0.38 * bits as f64).ceil() as u64 + 2;
        let work = (bits + 2 * a + 32) as u32;

        let e = elementary::exp(&BigFloat::one(work))?;
        let mut coeffs = Vec::with_capacity(a as usize);
        coeffs.push(pi_reference(work).mul_pow2(1).sqrt()?);
        // e^(a-k) for k = a-1 down to 1 by repeated multiplication.
        let mut e_pows = vec![BigFloat::one(work); a as usize];
        for j in 1..a as usize {
            e_pows[j] = &e_pows[j - 1] * &e;
        }
        for k in 1..a {
            let base = a - k;
            let int_pow = num_traits::pow(BigInt::from(base), (k - 1) as usize);
            let mut c = BigFloat::from_bigint(int_pow, work);
            c = &c * &BigFloat::from_i64(base as i64, work).sqrt()?;
            c = &c * &e_pows[base as usize];
            c = &c / &BigFloat::from_bigint(factorial((k - 1) as usize), work);
            if k % 2 == 0 {
                c = -c;
            }
            coeffs.push(c);
        }
        Ok(SpougeTable {
            precision,
            a,
            work,
            coeffs,
        })
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// `Gamma(x)` for rational `x > 0`.
    pub fn gamma(&self, x: &BigRational) -> Result<BigFloat> {
        if !x.is_positive() {
            return Err(Error::Domain(format!("Gamma needs a positive argument, got {x}")));
        }
        let one = BigRational::one();
        if x < &one {
            // Gamma(x) = Gamma(x+1)/x keeps the Spouge argument z = x >= 0.
            let g = self.gamma_shifted(x)?;
            let xf = BigFloat::from_rational(x, self.work);
            return Ok((&g / &xf).with_precision(self.precision));
        }
        Ok(self.gamma_shifted(&(x - one))?.with_precision(self.precision))
    }

    /// `Gamma(z+1)` for rational `z >= 0`, at working precision.
    fn gamma_shifted(&self, z: &BigRational) -> Result<BigFloat> {
        let w = self.work;
        let mut series = self.coeffs[0].clone();
        for (k, c) in self.coeffs.iter().enumerate().skip(1) {
            let den = z + BigRational::from_integer(BigInt::from(k));
            let inv = BigFloat::from_rational(&den.recip(), w);
            series = &series + &(c * &inv);
        }
        let za = z + BigRational::from_integer(BigInt::from(self.a));
        let za_f = BigFloat::from_rational(&za, w);
        let half = BigRational::new(BigInt::one(), BigInt::from(2));
        let expo = BigFloat::from_rational(&(z + half), w);
        // (z+a)^(z+1/2) e^(-(z+a)) = exp((z+1/2) ln(z+a) - (z+a))
        let log_part = &(&expo * &elementary::ln(&za_f)?) - &za_f;
        let lead = elementary::exp(&log_part.with_precision(w + 32))?;
        Ok(&lead.with_precision(w) * &series)
    }
}

/// `Gamma(x)` for rational `x > 0` with relative error at most `2^(8 - precision)`.
pub fn gamma_rational(x: &BigRational, precision: u32) -> Result<BigFloat> {
    if x.is_zero() || x.is_negative() {
        return Err(Error::Domain(format!("Gamma needs a positive argument, got {x}")));
    }
    SpougeTable::new(precision)?.gamma(x)
}

/// `Gamma(x+n) / (n^x (n-1)!)`, which tends to 1 as `n` grows.
pub fn factorial_growth_ratio(x: &BigRational, n: usize, precision: u32) -> Result<BigFloat> {
    if n == 0 {
        return Err(Error::Domain("n must be positive".into()));
    }
    let w = precision + 32;
    // Gamma(x+n) = Gamma(x) (x)_n
    let poch = crate::factorial::pochhammer(x, n) / BigRational::from_integer(factorial(n - 1));
    let num = &gamma_rational(x, w)? * &BigFloat::from_rational(&poch, w);
    let log_n = elementary::ln(&BigFloat::from_i64(n as i64, w))?;
    let den = elementary::exp(&(&BigFloat::from_rational(x, w) * &log_n))?;
    Ok(num.checked_div(&den)?.with_precision(precision))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn rel_err_bits(a: &BigFloat, b: &BigFloat) -> i64 {
        let d = (a - b).abs();
        if d.is_zero() {
            return i64::MIN;
        }
        d.magnitude_exponent() - b.magnitude_exponent()
    }

    #[test]
    fn integers_are_factorials() {
        let t = SpougeTable::new(128).unwrap();
        assert!(rel_err_bits(&t.gamma(&int(1)).unwrap(), &BigFloat::one(128)) < -118);
        assert!(rel_err_bits(&t.gamma(&int(2)).unwrap(), &BigFloat::one(128)) < -118);
        let g6 = t.gamma(&int(6)).unwrap();
        assert!(rel_err_bits(&g6, &BigFloat::from_i64(120, 128)) < -118);
    }

    #[test]
    fn half_squared_is_pi() {
        let p = 300;
        let g = gamma_rational(&rat(1, 2), p).unwrap();
        assert!(rel_err_bits(&g.square(), &pi_reference(p)) < -(p as i64) + 10);
    }

    #[test]
    fn rejects_nonpositive() {
        assert!(gamma_rational(&int(0), 64).is_err());
        assert!(gamma_rational(&rat(-1, 2), 64).is_err());
    }

    #[test]
    fn growth_ratio_tends_to_one() {
        for x in [rat(1, 3), rat(1, 2), rat(5, 6)] {
            let d100 = (factorial_growth_ratio(&x, 100, 128).unwrap().to_f64() - 1.0).abs();
            let d1000 = (factorial_growth_ratio(&x, 1000, 128).unwrap().to_f64() - 1.0).abs();
            assert!(d100 < 1e-2 && d1000 < 1e-3 && d1000 < d100, "{x}: {d100} {d1000}");
        }
        // x = 1: n! / (n (n-1)!) is exactly 1
        let one = factorial_growth_ratio(&int(1), 50, 128).unwrap();
        assert!((one.to_f64() - 1.0).abs() < 1e-30);
    }
}
