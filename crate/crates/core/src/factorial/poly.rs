//! Univariate polynomials and rational functions in the summation index `k`.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational::{common_denominator, format_rational};
use crate::{Error, Result};

/// Coefficients in ascending degree, without trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Polynomial {
    coeffs: Vec<BigRational>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Polynomial { coeffs }
    }

    pub fn zero() -> Self {
        Polynomial { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn one() -> Self {
        Polynomial::constant(BigRational::one())
    }

    /// `c0 + c1 k`.
    pub fn linear(c0: BigRational, c1: BigRational) -> Self {
        Polynomial::new(vec![c0, c1])
    }

    /// `k + shift`.
    pub fn shifted_k(shift: &BigRational) -> Self {
        Polynomial::linear(shift.clone(), BigRational::one())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> BigRational {
        self.coeffs.last().cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn eval(&self, k: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * k + c)
    }

    pub fn eval_int(&self, k: i64) -> BigRational {
        self.eval(&BigRational::from_integer(BigInt::from(k)))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Polynomial::new(self.coeffs.iter().map(|x| x * c).collect())
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(&self.leading().recip())
    }

    pub fn derivative(&self) -> Self {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigRational::from_integer(BigInt::from(i)))
                .collect(),
        )
    }

    /// `p(k + h)`.
    pub fn shift(&self, h: &BigRational) -> Self {
        let lin = Polynomial::shifted_k(h);
        self.coeffs
            .iter()
            .rev()
            .fold(Polynomial::zero(), |acc, c| &(&acc * &lin) + &Polynomial::constant(c.clone()))
    }

    pub fn div_rem(&self, d: &Polynomial) -> Result<(Polynomial, Polynomial)> {
        let dd = d
            .degree()
            .ok_or_else(|| Error::zero_den("polynomial division by zero"))?;
        let mut rem = self.coeffs.clone();
        let lead = d.leading();
        let mut quot = vec![BigRational::zero(); rem.len().saturating_sub(dd)];
        while rem.len() > dd && !rem.is_empty() {
            let shift = rem.len() - 1 - dd;
            let c = rem.last().unwrap() / &lead;
            for (i, dc) in d.coeffs.iter().enumerate() {
                rem[shift + i] -= &c * dc;
            }
            quot[shift] = c;
            rem.pop();
            while rem.last().is_some_and(Zero::is_zero) {
                rem.pop();
            }
        }
        Ok((Polynomial::new(quot), Polynomial::new(rem)))
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Polynomial) -> Polynomial {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b).expect("nonzero divisor");
            a = b;
            b = r;
        }
        a.monic()
    }

    /// Integer multiple with coprime integer coefficients.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let den = common_denominator(&self.coeffs);
        let ints: Vec<BigInt> = self
            .coeffs
            .iter()
            .map(|c| (c * BigRational::from_integer(den.clone())).to_integer())
            .collect();
        let g = ints.iter().fold(BigInt::zero(), |g, x| g.gcd(x));
        if g.is_zero() {
            return ints;
        }
        ints.into_iter().map(|x| x / &g).collect()
    }

    /// Distinct rational roots, by the rational root theorem.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let mut roots = Vec::new();
        let mut p = self.clone();
        // Strip the root at zero first so the constant term is nonzero.
        if p.coeffs.first().is_some_and(Zero::is_zero) {
            roots.push(BigRational::zero());
            while p.coeffs.first().is_some_and(Zero::is_zero) {
                p.coeffs.remove(0);
            }
        }
        if p.degree().unwrap_or(0) == 0 {
            return roots;
        }
        let ints = p.primitive_integer();
        let a0 = ints.first().unwrap().abs();
        let an = ints.last().unwrap().abs();
        for q in divisors(&an) {
            for num in divisors(&a0) {
                for s in [1i32, -1] {
                    let r = BigRational::new(&num * BigInt::from(s), q.clone());
                    if p.eval(&r).is_zero() && !roots.contains(&r) {
                        roots.push(r);
                    }
                }
            }
        }
        roots.sort();
        roots
    }
}

fn divisors(n: &BigInt) -> Vec<BigInt> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let root = n.sqrt();
    let mut d = BigInt::one();
    while d <= root {
        if (n % &d).is_zero() {
            let other = n / &d;
            if other != d {
                large.push(other);
            }
            small.push(d.clone());
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = BigRational::zero();
        Polynomial::new(
            (0..n)
                .map(|i| self.coeffs.get(i).unwrap_or(&zero) + rhs.coeffs.get(i).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        if self.is_zero() || rhs.is_zero() {
            return Polynomial::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let coef = format_rational(&mag);
            match i {
                0 => write!(f, "{coef}")?,
                _ if mag.is_one() => write!(f, "k")?,
                _ => write!(f, "{coef}*k")?,
            }
            if i > 1 {
                write!(f, "^{i}")?;
            }
        }
        Ok(())
    }
}

/// `numerator(k) / denominator(k)`, stored with a monic denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalFunctionOfK {
    numerator: Polynomial,
    denominator: Polynomial,
}

impl RationalFunctionOfK {
    pub fn new(numerator: Polynomial, denominator: Polynomial) -> Result<Self> {
        if denominator.is_zero() {
            return Err(Error::zero_den("rational function with zero denominator"));
        }
        let lead = denominator.leading().recip();
        Ok(RationalFunctionOfK {
            numerator: numerator.scale(&lead),
            denominator: denominator.scale(&lead),
        })
    }

    pub fn from_polynomial(p: Polynomial) -> Self {
        RationalFunctionOfK {
            numerator: p,
            denominator: Polynomial::one(),
        }
    }

    /// Cancels the common factor of numerator and denominator.
    pub fn reduced(&self) -> Self {
        if self.numerator.is_zero() {
            return RationalFunctionOfK::from_polynomial(Polynomial::zero());
        }
        let g = self.numerator.gcd(&self.denominator);
        let (n, _) = self.numerator.div_rem(&g).expect("gcd is nonzero");
        let (d, _) = self.denominator.div_rem(&g).expect("gcd is nonzero");
        RationalFunctionOfK::new(n, d).expect("denominator stays nonzero")
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.numerator
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.denominator
    }

    pub fn eval(&self, k: &BigRational) -> Result<BigRational> {
        let d = self.denominator.eval(k);
        if d.is_zero() {
            return Err(Error::zero_den(format!("rational function has a pole at k = {k}")));
        }
        Ok(self.numerator.eval(k) / d)
    }

    pub fn eval_int(&self, k: i64) -> Result<BigRational> {
        self.eval(&BigRational::from_integer(BigInt::from(k)))
    }

    pub fn mul(&self, other: &RationalFunctionOfK) -> Self {
        RationalFunctionOfK::new(
            &self.numerator * &other.numerator,
            &self.denominator * &other.denominator,
        )
        .expect("product of nonzero denominators")
    }

    /// Limit as `k -> infinity`, when finite.
    pub fn limit_at_infinity(&self) -> Option<BigRational> {
        let dn = self.numerator.degree();
        let dd = self.denominator.degree()?;
        match dn {
            None => Some(BigRational::zero()),
            Some(n) if n < dd => Some(BigRational::zero()),
            Some(n) if n == dd => Some(self.numerator.leading() / self.denominator.leading()),
            _ => None,
        }
    }
}

impl fmt::Display for RationalFunctionOfK {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}) / ({})", self.numerator, self.denominator)
    }
}

/// `poly(k) + sum_i coeff_i / (k + pole_i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PartialFractions {
    pub polynomial_part: Polynomial,
    pub terms: Vec<(BigRational, BigRational)>,
}

impl PartialFractions {
    /// Recombines over the common denominator.
    pub fn recombine(&self) -> RationalFunctionOfK {
        let mut den = Polynomial::one();
        for (_, p) in &self.terms {
            den = &den * &Polynomial::shifted_k(p);
        }
        let mut num = &self.polynomial_part * &den;
        for (i, (c, _)) in self.terms.iter().enumerate() {
            let mut others = Polynomial::constant(c.clone());
            for (j, (_, p)) in self.terms.iter().enumerate() {
                if i != j {
                    others = &others * &Polynomial::shifted_k(p);
                }
            }
            num = &num + &others;
        }
        RationalFunctionOfK::new(num, den).expect("monic denominator")
    }
}

/// Decomposes `r` into simple fractions over distinct rational poles.
///
/// A repeated root of the denominator is reported as
/// [`Error::RepeatedPole`]; an irreducible factor of degree above one as
/// [`Error::NotSplit`].
pub fn partial_fractions(r: &RationalFunctionOfK) -> Result<PartialFractions> {
    let r = r.reduced();
    let den = r.denominator();
    let (poly_part, rem) = r.numerator().div_rem(den)?;
    let square_part = den.gcd(&den.derivative());
    if square_part.degree().unwrap_or(0) > 0 {
        let roots = square_part.rational_roots();
        let shown = roots
            .iter()
            .map(format_rational)
            .collect::<Vec<_>>()
            .join(", ");
        return Err(Error::RepeatedPole(if shown.is_empty() {
            format!("denominator {den} has a repeated factor")
        } else {
            shown
        }));
    }
    let roots = den.rational_roots();
    if roots.len() != den.degree().unwrap_or(0) {
        return Err(Error::NotSplit(den.to_string()));
    }
    let dprime = den.derivative();
    let terms = roots
        .iter()
        .map(|root| (rem.eval(root) / dprime.eval(root), -root))
        .filter(|(c, _)| !c.is_zero())
        .collect();
    Ok(PartialFractions {
        polynomial_part: poly_part,
        terms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn poly(cs: &[i64]) -> Polynomial {
        Polynomial::new(cs.iter().map(|&c| int(c)).collect())
    }

    #[test]
    fn arithmetic() {
        let p = poly(&[1, 2, 3]);
        assert_eq!(p.eval_int(2), int(17));
        assert_eq!(p.shift(&int(1)).eval_int(1), int(17));
        assert_eq!(p.derivative(), poly(&[2, 6]));
        let (q, r) = poly(&[-1, 0, 1]).div_rem(&poly(&[-1, 1])).unwrap();
        assert_eq!(q, poly(&[1, 1]));
        assert!(r.is_zero());
        assert_eq!(poly(&[-1, 0, 1]).gcd(&poly(&[1, 1])), poly(&[1, 1]));
        assert_eq!(format!("{}", poly(&[3, 34, 120])), "120*k^2 + 34*k + 3");
    }

    #[test]
    fn rational_roots() {
        // (2k - 1)(3k + 2) k
        let p = &(&poly(&[-1, 2]) * &poly(&[2, 3])) * &poly(&[0, 1]);
        assert_eq!(p.rational_roots(), vec![rat(-2, 3), int(0), rat(1, 2)]);
        assert!(poly(&[1, 0, 1]).rational_roots().is_empty());
    }

    #[test]
    fn telescoping_fraction() {
        let r = RationalFunctionOfK::new(Polynomial::one(), poly(&[0, 1, 1])).unwrap();
        let pf = partial_fractions(&r).unwrap();
        assert!(pf.polynomial_part.is_zero());
        assert_eq!(pf.terms, vec![(int(-1), int(1)), (int(1), int(0))]);
        assert_eq!(pf.recombine(), r);
    }

    #[test]
    fn repeated_and_irreducible() {
        let r = RationalFunctionOfK::new(Polynomial::one(), poly(&[1, 2, 1])).unwrap();
        assert!(matches!(partial_fractions(&r), Err(Error::RepeatedPole(_))));
        let r = RationalFunctionOfK::new(Polynomial::one(), poly(&[1, 0, 1])).unwrap();
        assert!(matches!(partial_fractions(&r), Err(Error::NotSplit(_))));
    }

    #[test]
    fn limit() {
        let r = RationalFunctionOfK::new(poly(&[1, 2]), poly(&[5, 32])).unwrap();
        assert_eq!(r.limit_at_infinity(), Some(rat(1, 16)));
    }
}
