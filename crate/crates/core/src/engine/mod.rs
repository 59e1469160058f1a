//! Fast evaluation of catalog series: exact binary splitting, pi recovery
//! from a certified identity, and convergence-rate measurement.

mod bbp;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::catalog::CatalogEntry;
use crate::factorial::SeriesSpec;
use crate::numeric::{bits_for_digits, BigFloat};
use crate::rational::{is_nonpositive_integer, format_rational};
use crate::{Error, Result};

pub use bbp::{bbp_hex_digits, hex_digits_of, verify_bbp_equivalence, BbpFamily, BbpReport, BBP_MAX_POSITION};

/// Exact partial data over an index interval `[lo, hi)`:
/// `sum_{k in [lo,hi)} A(k) prod_{lo<=i<k} p(i)/q(i) = T / Q` and `P = prod p(i)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitNode {
    pub p: BigInt,
    pub q: BigInt,
    pub t: BigInt,
}

impl SplitNode {
    /// Joins `[lo, mid)` with `[mid, hi)`.
    pub fn merge(&self, right: &SplitNode) -> SplitNode {
        SplitNode {
            p: &self.p * &right.p,
            q: &self.q * &right.q,
            t: &self.t * &right.q + &self.p * &right.t,
        }
    }
}

/// Integer form of a spec's term recurrence. With `g(k) = prod (u)_k / prod (l)_k / base^k`,
/// `g(k+1)/g(k) = p(k)/q(k)` and `poly(k) = A(k) / scale`.
struct Recurrence {
    up: Vec<(BigInt, BigInt)>,
    low: Vec<(BigInt, BigInt)>,
    p_const: BigInt,
    q_const: BigInt,
    weight: Vec<BigInt>,
    scale: BigInt,
}

fn num_den(x: &BigRational) -> (BigInt, BigInt) {
    (x.numer().clone(), x.denom().clone())
}

impl Recurrence {
    fn new(spec: &SeriesSpec) -> Self {
        let up: Vec<_> = spec.quotient.upper.iter().map(num_den).collect();
        let low: Vec<_> = spec.quotient.lower.iter().map(num_den).collect();
        // (n/d + k) = (n + d k)/d, so denominators of upper entries land in q and vice versa.
        let p_const = low.iter().fold(BigInt::one(), |acc, (_, d)| acc * d);
        let q_const = up.iter().fold(BigInt::from(spec.base), |acc, (_, d)| acc * d);
        let scale = spec
            .poly
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let weight = spec
            .poly
            .iter()
            .map(|c| (c * BigRational::from_integer(scale.clone())).to_integer())
            .collect();
        Recurrence { up, low, p_const, q_const, weight, scale }
    }

    fn p(&self, k: u64) -> BigInt {
        let k = BigInt::from(k);
        self.up.iter().fold(self.p_const.clone(), |acc, (n, d)| acc * (n + d * &k))
    }

    fn q(&self, k: u64) -> BigInt {
        let k = BigInt::from(k);
        self.low.iter().fold(self.q_const.clone(), |acc, (n, d)| acc * (n + d * &k))
    }

    fn a(&self, k: u64) -> BigInt {
        let k = BigInt::from(k);
        self.weight.iter().rev().fold(BigInt::zero(), |acc, c| acc * &k + c)
    }

    fn split(&self, lo: u64, hi: u64) -> SplitNode {
        if hi - lo == 1 {
            let q = self.q(lo);
            return SplitNode { p: self.p(lo), t: self.a(lo) * &q, q };
        }
        let mid = lo + (hi - lo) / 2;
        let (l, r) = if hi - lo > 48 {
            crate::par::join(|| self.split(lo, mid), || self.split(mid, hi))
        } else {
            (self.split(lo, mid), self.split(mid, hi))
        };
        l.merge(&r)
    }
}

/// Binary-splitting node for the terms `k in [lo, hi)` of `spec`.
pub fn split_node(spec: &SeriesSpec, lo: usize, hi: usize) -> Result<SplitNode> {
    spec.validate()?;
    if lo >= hi {
        return Err(Error::Range(format!("empty interval [{lo}, {hi})")));
    }
    Ok(Recurrence::new(spec).split(lo as u64, hi as u64))
}

/// Numerator and denominator of `sum_{k=start}^{start+terms-1} term(k)`, unreduced.
fn split_fraction(spec: &SeriesSpec, terms: usize) -> Result<(BigInt, BigInt)> {
    spec.validate()?;
    if terms == 0 || spec.polynomial().is_zero() {
        return Ok((BigInt::zero(), BigInt::one()));
    }
    let s = spec.start;
    let g0 = spec.quotient.eval(s)? / BigRational::from_integer(num_traits::pow(BigInt::from(spec.base), s));
    if g0.is_zero() {
        return Ok((BigInt::zero(), BigInt::one()));
    }
    let rec = Recurrence::new(spec);
    let node = rec.split(s as u64, (s + terms) as u64);
    let mut num = g0.numer() * node.t;
    if spec.sign < 0 {
        num = -num;
    }
    let den = g0.denom() * rec.scale * node.q;
    if den.is_zero() {
        return Err(Error::zero_den("lower Pochhammer vanished inside the summation range"));
    }
    Ok((num, den))
}

/// `additive + sum` of the first `terms` terms, exactly, by binary splitting.
pub fn partial_sum_split(spec: &SeriesSpec, terms: usize) -> Result<BigRational> {
    let (n, d) = split_fraction(spec, terms)?;
    Ok(&spec.additive + BigRational::new(n, d))
}

/// The same partial sum by direct term-by-term accumulation; the oracle for
/// [`partial_sum_split`].
pub fn partial_sum_naive(spec: &SeriesSpec, terms: usize) -> Result<BigRational> {
    spec.validate()?;
    if terms == 0 {
        return Ok(spec.additive.clone());
    }
    spec.partial_sum(spec.start + terms - 1)
}

/// Terms needed for `digits` decimal digits at rate `1/16`, plus 20 guard terms.
pub fn terms_for_digits(digits: u32) -> usize {
    (digits as f64 * std::f64::consts::LN_10 / 16f64.ln()).ceil() as usize + 20
}

/// Working precision for `digits` digits.
pub fn precision_for_digits(digits: u32) -> u32 {
    bits_for_digits(digits) + 64
}

#[derive(Clone, Debug)]
pub struct SeriesSum {
    pub value: BigFloat,
    /// Upper bound on the absolute error: truncated tail plus final rounding.
    pub error_bound: BigFloat,
    pub terms: usize,
}

/// `additive + sum_k term(k)` to within `10^-digits / 4`.
pub fn sum_series(spec: &SeriesSpec, digits: u32) -> Result<SeriesSum> {
    let terms = terms_for_digits(digits);
    let prec = precision_for_digits(digits);
    let (n, d) = split_fraction(spec, terms)?;
    let tail = BigFloat::from_bigint(n, prec + 8).checked_div(&BigFloat::from_bigint(d, prec + 8))?;
    let value = (&tail + &BigFloat::from_rational(&spec.additive, prec + 8)).with_precision(prec);
    let rounding = if value.is_zero() {
        BigFloat::one(64).mul_pow2(-(prec as i64))
    } else {
        BigFloat::one(64).mul_pow2(value.magnitude_exponent() + 3 - prec as i64)
    };
    let error_bound = &tail_bound(spec, spec.start + terms, prec)? + &rounding;
    Ok(SeriesSum { value, error_bound: error_bound.with_precision(64), terms })
}

/// Bound on `sum_{k>=n} |term(k)|` from a geometric majorant on the ratio.
fn tail_bound(spec: &SeriesSpec, n: usize, prec: u32) -> Result<BigFloat> {
    let ratio = spec.term_ratio();
    let mut rho = BigRational::new(BigInt::one(), BigInt::from(spec.base));
    for k in n..n + 32 {
        if let Ok(r) = ratio.eval_int(k as i64) {
            rho = rho.max(r.abs());
        }
    }
    // Inflate the sampled sup to cover the slow monotone drift of a rational ratio.
    let rho = rho * BigRational::new(BigInt::from(5), BigInt::from(4));
    let one = BigRational::one();
    if rho >= one {
        return Err(Error::Domain(format!(
            "term ratio {} near index {n} does not give a convergent tail",
            format_rational(&rho)
        )));
    }
    let lead = spec.term(n)?.abs().max(spec.term(n + 1)?.abs());
    let bound = lead * BigRational::from_integer(2.into()) / (one - rho);
    Ok(BigFloat::from_rational(&bound, prec.min(128)))
}

/// Whether `term(k)` is exactly zero.
fn term_vanishes(spec: &SeriesSpec, k: usize) -> bool {
    spec.polynomial().eval_int(k as i64).is_zero()
        || spec
            .quotient
            .upper
            .iter()
            .any(|u| is_nonpositive_integer(u) && (-u).to_integer() < BigInt::from(k))
}

#[derive(Clone, Debug)]
pub struct RateReport {
    pub k: usize,
    /// `|term(k+1) / term(k)|`, exact before conversion.
    pub exact: BigRational,
    pub ratio: BigFloat,
    pub target: BigRational,
}

impl RateReport {
    /// `|ratio / target - 1|` as a float.
    pub fn relative_deviation(&self) -> f64 {
        let d = (&self.exact / &self.target - BigRational::one()).abs();
        BigFloat::from_rational(&d, 64).to_f64()
    }
}

pub fn convergence_rate(spec: &SeriesSpec, k: usize) -> Result<RateReport> {
    spec.validate()?;
    for i in [k, k + 1] {
        if term_vanishes(spec, i) {
            return Err(Error::ZeroTerm(i));
        }
    }
    let exact = spec.term_ratio().eval_int(k as i64)?.abs();
    Ok(RateReport {
        k,
        ratio: BigFloat::from_rational(&exact, 128),
        exact,
        target: BigRational::new(BigInt::one(), BigInt::from(spec.base)),
    })
}

/// Recovers pi from an entry whose left side is `A * pi^e`, `e in {-2,-1,1,2}`,
/// with `A` algebraic. Error below `10^-digits`.
pub fn compute_pi_via(entry: &CatalogEntry, digits: u32) -> Result<BigFloat> {
    let sig = entry.lhs.signature()?;
    if !sig.gamma.is_empty() {
        return Err(Error::UnsupportedLhs(format!("{} involves Gamma values", entry.id)));
    }
    if !matches!(sig.pi, -2 | -1 | 1 | 2) {
        return Err(Error::UnsupportedLhs(format!("{} has pi exponent {}", entry.id, sig.pi)));
    }
    let work = digits + 10;
    let prec = precision_for_digits(work);
    let s = sum_series(&entry.spec, work)?.value;
    let a = entry.lhs.eval_algebraic_part(prec)?;
    let q = if sig.pi > 0 { s.checked_div(&a)? } else { a.checked_div(&s)? };
    let pi = if sig.pi.abs() == 2 {
        if q.is_negative() {
            return Err(Error::Domain(format!("{}: pi^2 came out negative", entry.id)));
        }
        q.sqrt()?
    } else {
        q
    };
    Ok(pi.with_precision(bits_for_digits(digits) + 32))
}
