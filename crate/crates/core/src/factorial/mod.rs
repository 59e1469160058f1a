//! Exact shifted factorials and the single-index series built from them.

mod poly;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, is_nonpositive_integer};
use crate::{Error, Result};

pub use poly::{partial_fractions, PartialFractions, Polynomial, RationalFunctionOfK};

/// `(x)_n = x (x+1) ... (x+n-1)`, with `(x)_0 = 1`.
pub fn pochhammer(x: &BigRational, n: usize) -> BigRational {
    let mut acc = BigRational::one();
    let mut t = x.clone();
    for _ in 0..n {
        if t.is_zero() {
            return BigRational::zero();
        }
        acc *= &t;
        t += BigRational::one();
    }
    acc
}

/// Product of `(x)_n` over a list of bases.
pub fn pochhammer_product(xs: &[BigRational], n: usize) -> BigRational {
    xs.iter().map(|x| pochhammer(x, n)).product()
}

/// `phi(x; n) = prod_{k<n} (a_k + x b_k)`.
pub fn phi_eval(
    a: &dyn Fn(usize) -> BigRational,
    b: &dyn Fn(usize) -> BigRational,
    x: &BigRational,
    n: usize,
) -> BigRational {
    (0..n).map(|k| a(k) + x * b(k)).product()
}

/// `prod (u_i)_k / prod (l_j)_k`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct FactorialQuotient {
    pub upper: Vec<BigRational>,
    pub lower: Vec<BigRational>,
}

impl FactorialQuotient {
    pub fn new(upper: Vec<BigRational>, lower: Vec<BigRational>) -> Self {
        FactorialQuotient { upper, lower }
    }

    pub fn validate(&self) -> Result<()> {
        match self.lower.iter().find(|l| is_nonpositive_integer(l)) {
            Some(l) => Err(Error::zero_den(format!(
                "lower entry {} is a non-positive integer",
                format_rational(l)
            ))),
            None => Ok(()),
        }
    }

    pub fn eval(&self, k: usize) -> Result<BigRational> {
        let den = pochhammer_product(&self.lower, k);
        if den.is_zero() {
            return Err(Error::zero_den(format!("lower Pochhammer vanishes at k = {k}")));
        }
        Ok(pochhammer_product(&self.upper, k) / den)
    }

    /// Removes entries occurring in both lists (with multiplicity).
    pub fn cancelled(&self) -> Self {
        let mut upper = self.upper.clone();
        let mut lower = Vec::new();
        for l in &self.lower {
            if let Some(pos) = upper.iter().position(|u| u == l) {
                upper.remove(pos);
            } else {
                lower.push(l.clone());
            }
        }
        FactorialQuotient { upper, lower }
    }
}

/// `sign * poly(k) * prod (u)_k / prod (l)_k * base^-k`, summed from
/// `start`, plus `additive`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeriesSpec {
    pub quotient: FactorialQuotient,
    pub poly: Vec<BigRational>,
    pub base: u32,
    pub start: usize,
    pub additive: BigRational,
    pub sign: i8,
}

impl SeriesSpec {
    pub fn new(upper: Vec<BigRational>, lower: Vec<BigRational>, poly: Vec<BigRational>, base: u32) -> Self {
        SeriesSpec {
            quotient: FactorialQuotient::new(upper, lower),
            poly,
            base,
            start: 0,
            additive: BigRational::zero(),
            sign: 1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.base == 0 {
            return Err(Error::zero_den("base must be positive"));
        }
        if self.sign != 1 && self.sign != -1 {
            return Err(Error::Domain(format!("sign must be +1 or -1, got {}", self.sign)));
        }
        self.quotient.validate()
    }

    pub fn polynomial(&self) -> Polynomial {
        Polynomial::new(self.poly.clone())
    }

    fn signed(&self, x: BigRational) -> BigRational {
        if self.sign < 0 {
            -x
        } else {
            x
        }
    }

    /// Exact `term(k)`.
    pub fn term(&self, k: usize) -> Result<BigRational> {
        let w = self.polynomial().eval_int(k as i64);
        if w.is_zero() {
            return Ok(w);
        }
        let q = self.quotient.eval(k)?;
        let b = num_traits::pow(BigInt::from(self.base), k);
        Ok(self.signed(w * q / BigRational::from_integer(b)))
    }

    /// `term(0..=last)`, built incrementally.
    pub fn terms(&self, last: usize) -> Result<Vec<BigRational>> {
        self.validate()?;
        let poly = self.polynomial();
        let base = BigRational::from_integer(BigInt::from(self.base));
        let mut g = BigRational::one();
        let mut out = Vec::with_capacity(last + 1);
        for k in 0..=last {
            let kk = BigRational::from_integer(BigInt::from(k));
            out.push(self.signed(poly.eval(&kk) * &g));
            let num: BigRational = self.quotient.upper.iter().map(|u| u + &kk).product();
            let den: BigRational = self.quotient.lower.iter().map(|l| l + &kk).product();
            g = g * num / (den * &base);
        }
        Ok(out)
    }

    /// `additive + sum_{k=start}^{last} term(k)`, exactly.
    pub fn partial_sum(&self, last: usize) -> Result<BigRational> {
        let terms = self.terms(last)?;
        Ok(&self.additive + terms.iter().skip(self.start).sum::<BigRational>())
    }

    /// `r(k)` with `term(k+1) = r(k) term(k)` wherever `term(k) != 0`.
    pub fn term_ratio(&self) -> RationalFunctionOfK {
        let p = self.polynomial();
        let mut num = p.shift(&BigRational::one());
        let mut den = p.scale(&BigRational::from_integer(BigInt::from(self.base)));
        for u in &self.quotient.upper {
            num = &num * &Polynomial::shifted_k(u);
        }
        for l in &self.quotient.lower {
            den = &den * &Polynomial::shifted_k(l);
        }
        if den.is_zero() {
            // Zero weight: every term vanishes and any ratio is sound.
            return RationalFunctionOfK::from_polynomial(Polynomial::zero());
        }
        RationalFunctionOfK::new(num, den)
            .expect("nonzero denominator")
            .reduced()
    }

    /// For specs whose upper and lower entries pair off with integer
    /// differences, the rational function `R` with
    /// `term(k) = sign * R(k) * base^-k`.
    pub fn rational_summand(&self) -> Result<RationalFunctionOfK> {
        let mut lower = self.quotient.lower.clone();
        let mut num = self.polynomial();
        let mut den = Polynomial::one();
        let mut konst = BigRational::one();
        for u in &self.quotient.upper {
            let pos = lower
                .iter()
                .position(|l| (l - u).is_integer())
                .ok_or_else(|| Error::NotSplit(format!("upper entry {} has no partner", format_rational(u))))?;
            let l = lower.remove(pos);
            let m = (&l - u).to_integer();
            let m: i64 = m
                .try_into()
                .map_err(|_| Error::NotSplit("pairing offset too large".into()))?;
            if m >= 0 {
                // (u)_k / (u+m)_k = (u)_m / prod_{j<m} (u+k+j)
                konst *= pochhammer(u, m as usize);
                for j in 0..m {
                    den = &den * &Polynomial::shifted_k(&(u + BigRational::from_integer(j.into())));
                }
            } else {
                // (l-m)_k / (l)_k = prod_{j<-m} (l+k+j) / (l)_{-m}
                let p = pochhammer(&l, (-m) as usize);
                if p.is_zero() {
                    return Err(Error::zero_den("paired lower entry vanishes"));
                }
                konst /= p;
                for j in 0..-m {
                    num = &num * &Polynomial::shifted_k(&(&l + BigRational::from_integer(j.into())));
                }
            }
        }
        if !lower.is_empty() {
            return Err(Error::NotSplit(format!("{} unpaired lower entries", lower.len())));
        }
        Ok(RationalFunctionOfK::new(num.scale(&konst), den)?.reduced())
    }
}

impl fmt::Display for SeriesSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let list = |xs: &[BigRational]| xs.iter().map(format_rational).collect::<Vec<_>>().join(", ");
        let sign = if self.sign < 0 { "-" } else { "" };
        if !self.additive.is_zero() {
            write!(f, "{} + ", format_rational(&self.additive))?;
        }
        write!(
            f,
            "sum_{{k>={}}} {sign}({}) [{}]_k / [{}]_k / {}^k",
            self.start,
            self.polynomial(),
            list(&self.quotient.upper),
            list(&self.quotient.lower),
            self.base
        )
    }
}

/// Splitting of a doubled-index Pochhammer into single-index factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// `(x)_{2k} = 4^k (x/2)_k ((x+1)/2)_k` and
/// `(x)_{2k+1} = x 4^k ((x+1)/2)_k ((x+2)/2)_k`: `constant * 4^k * (first)_k (second)_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DuplicateSplit {
    pub constant: BigRational,
    pub first: BigRational,
    pub second: BigRational,
}

impl DuplicateSplit {
    pub fn eval(&self, k: usize) -> BigRational {
        let four = BigRational::from_integer(num_traits::pow(BigInt::from(4), k));
        &self.constant * four * pochhammer(&self.first, k) * pochhammer(&self.second, k)
    }
}

pub fn duplicate_index(x: &BigRational, parity: Parity) -> DuplicateSplit {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    match parity {
        Parity::Even => DuplicateSplit {
            constant: BigRational::one(),
            first: x * &half,
            second: (x + BigRational::one()) * &half,
        },
        Parity::Odd => DuplicateSplit {
            constant: x.clone(),
            first: (x + BigRational::one()) * &half,
            second: (x + BigRational::from_integer(2.into())) * &half,
        },
    }
}

/// `|term(k+1)/term(k)|` should approach `1/base`; this is the exact
/// ratio, or an error if `term(k)` vanishes.
pub fn exact_ratio(spec: &SeriesSpec, k: usize) -> Result<BigRational> {
    let t0 = spec.term(k)?;
    if t0.is_zero() {
        return Err(Error::ZeroTerm(k));
    }
    Ok((spec.term(k + 1)? / t0).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn guillera() -> SeriesSpec {
        let h = rat(1, 2);
        SeriesSpec::new(
            vec![h.clone(), h.clone(), h, rat(1, 4), rat(3, 4)],
            vec![int(1); 5],
            vec![int(3), int(34), int(120)],
            16,
        )
    }

    #[test]
    fn pochhammer_values() {
        assert_eq!(pochhammer(&rat(7, 3), 0), int(1));
        assert_eq!(pochhammer(&rat(1, 2), 2), rat(3, 4));
        assert_eq!(pochhammer(&rat(-1, 6), 3), rat(-55, 216));
        assert_eq!(pochhammer(&int(-2), 5), int(0));
    }

    #[test]
    fn phi_values() {
        let one = |_: usize| int(1);
        let zero = |_: usize| int(0);
        assert_eq!(phi_eval(&one, &zero, &rat(5, 7), 5), int(1));
        assert_eq!(phi_eval(&one, &zero, &rat(5, 7), 0), int(1));
        let a = |k: usize| int(k as i64 + 1);
        assert_eq!(phi_eval(&a, &one, &int(1), 3), int(24));
    }

    #[test]
    fn guillera_terms() {
        let s = guillera();
        assert_eq!(s.term(0).unwrap(), int(3));
        assert_eq!(s.term(1).unwrap(), rat(471, 2048));
        let mut zero = guillera();
        zero.poly = vec![int(0)];
        assert_eq!(zero.term(4).unwrap(), int(0));
    }

    #[test]
    fn guillera_ratio() {
        let s = guillera();
        let r = s.term_ratio();
        for k in 0..=50 {
            assert_eq!(r.eval_int(k).unwrap() * s.term(k as usize).unwrap(), s.term(k as usize + 1).unwrap());
        }
        assert_eq!(r.limit_at_infinity(), Some(rat(1, 16)));
    }

    #[test]
    fn geometric_ratio() {
        let s = SeriesSpec::new(vec![], vec![], vec![int(1)], 16);
        let r = s.term_ratio();
        assert_eq!(r.eval_int(3).unwrap(), rat(1, 16));
    }

    #[test]
    fn duplicate_examples() {
        let d = duplicate_index(&int(1), Parity::Even);
        for k in 0..=30 {
            assert_eq!(d.eval(k), pochhammer(&int(1), 2 * k));
        }
        let d = duplicate_index(&rat(1, 2), Parity::Even);
        assert_eq!(pochhammer(&rat(1, 2), 4), rat(105, 16));
        assert_eq!(d.eval(2), rat(105, 16));
        assert_eq!(d.first, rat(1, 4));
        assert_eq!(d.second, rat(3, 4));
        let d = duplicate_index(&rat(1, 2), Parity::Odd);
        assert_eq!(d.eval(1), rat(15, 8));
    }

    #[test]
    fn rejects_nonpositive_lower() {
        let s = SeriesSpec::new(vec![int(1)], vec![int(-2)], vec![int(1)], 16);
        assert!(s.validate().is_err());
        let s = SeriesSpec::new(vec![rat(-1, 2)], vec![int(1)], vec![int(1)], 16);
        assert!(s.validate().is_ok());
    }

    #[test]
    fn telescoping_summand() {
        // 1/(k(k+1)) written as (1)_k (1)_k / ((2)_k (2)_k) shifted: use
        // (1)_k/(2)_k = 1/(k+1).
        let s = SeriesSpec::new(vec![int(1)], vec![int(2)], vec![int(1)], 1);
        let r = s.rational_summand().unwrap();
        assert_eq!(r.eval_int(3).unwrap(), rat(1, 4));
    }
}
