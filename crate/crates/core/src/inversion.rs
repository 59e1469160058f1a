//! The Gould–Hsu inverse series relations and their `lambda`-extension.
//!
//! With `phi(x; n) = prod_{k<n} (a_k + x b_k)`:
//!
//! * plain pair:
//!   `f(n) = sum_k (-1)^k C(n,k) phi(k; n) g(k)` and
//!   `g(n) = sum_k (-1)^k C(n,k) (a_k + k b_k) / phi(n; k+1) f(k)`;
//! * extended pair:
//!   `f(n) = sum_k (-1)^k C(n,k) phi(lambda+k; n) phi(-k; n) (lambda+2k) / (lambda+n)_{k+1} g(k)` and
//!   `g(n) = sum_k (-1)^k C(n,k) (a_k + lambda b_k + k b_k)(a_k - k b_k) / (phi(lambda+n; k+1) phi(-n; k+1)) (lambda+k)_n f(k)`.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::factorial::pochhammer;
use crate::rational::{binomial, format_rational};
use crate::rng::SplitMix64;
use crate::{Error, Result};

pub type Seq = Arc<dyn Fn(usize) -> BigRational + Send + Sync>;

#[derive(Clone)]
pub struct InversionScheme {
    pub a: Seq,
    pub b: Seq,
    pub lambda: BigRational,
}

impl fmt::Debug for InversionScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head = |s: &Seq| (0..4).map(|k| format_rational(&s(k))).collect::<Vec<_>>().join(", ");
        write!(
            f,
            "InversionScheme {{ a: [{}, ..], b: [{}, ..], lambda: {} }}",
            head(&self.a),
            head(&self.b),
            format_rational(&self.lambda)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Pair {
    Plain,
    Extended,
}

impl Pair {
    pub fn name(self) -> &'static str {
        match self {
            Pair::Plain => "plain",
            Pair::Extended => "extended",
        }
    }
}

fn sign(k: usize) -> BigRational {
    if k.is_multiple_of(2) {
        BigRational::one()
    } else {
        -BigRational::one()
    }
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn binom(n: usize, k: usize) -> BigRational {
    BigRational::from_integer(binomial(n, k))
}

impl InversionScheme {
    pub fn new(a: Seq, b: Seq, lambda: BigRational) -> Self {
        InversionScheme { a, b, lambda }
    }

    /// Schemes given by finite tables, constant past the end.
    pub fn from_tables(a: Vec<BigRational>, b: Vec<BigRational>, lambda: BigRational) -> Self {
        let at = |v: Vec<BigRational>| -> Seq {
            Arc::new(move |k| v.get(k).or(v.last()).cloned().unwrap_or_else(BigRational::zero))
        };
        InversionScheme::new(at(a), at(b), lambda)
    }

    pub fn phi(&self, x: &BigRational, n: usize) -> BigRational {
        crate::factorial::phi_eval(&*self.a, &*self.b, x, n)
    }

    /// Checks every denominator the chosen pair divides by for indices up to `n_max`.
    pub fn validate(&self, n_max: usize, pair: Pair) -> Result<()> {
        let mut points: Vec<BigRational> = (0..=n_max as i64).map(int).collect();
        if pair == Pair::Extended {
            for n in 0..=n_max as i64 {
                points.push(&self.lambda + int(n));
                points.push(int(-n));
            }
            for m in 0..=2 * n_max as i64 {
                if (&self.lambda + int(m)).is_zero() {
                    return Err(Error::zero_den(format!(
                        "(lambda + n)_(k+1) vanishes: lambda = {}",
                        format_rational(&self.lambda)
                    )));
                }
            }
        }
        for j in 0..=n_max {
            let (a, b) = ((self.a)(j), (self.b)(j));
            for x in &points {
                if (&a + x * &b).is_zero() {
                    return Err(Error::zero_den(format!(
                        "a_{j} + x b_{j} vanishes at x = {}",
                        format_rational(x)
                    )));
                }
            }
        }
        Ok(())
    }

    /// Random scheme with numerators and denominators bounded by `max`,
    /// redrawn until every denominator up to `n_max` is nonzero.
    pub fn random(rng: &mut SplitMix64, max: i64, n_max: usize, lambda: Option<BigRational>, pair: Pair) -> Self {
        loop {
            let a: Vec<BigRational> = (0..=n_max).map(|_| rng.rational(max)).collect();
            let b: Vec<BigRational> = (0..=n_max).map(|_| rng.rational(max)).collect();
            let lam = lambda.clone().unwrap_or_else(|| rng.rational(max));
            let s = InversionScheme::from_tables(a, b, lam);
            if s.validate(n_max, pair).is_ok() {
                return s;
            }
        }
    }
}

pub fn forward_gh(s: &InversionScheme, g: &[BigRational], n: usize) -> BigRational {
    (0..=n)
        .map(|k| sign(k) * binom(n, k) * s.phi(&int(k as i64), n) * &g[k])
        .sum()
}

pub fn inverse_gh(s: &InversionScheme, f: &[BigRational], n: usize) -> Result<BigRational> {
    let nn = int(n as i64);
    let mut acc = BigRational::zero();
    for (k, fk) in f.iter().enumerate().take(n + 1) {
        let den = s.phi(&nn, k + 1);
        if den.is_zero() {
            return Err(Error::zero_den(format!("phi({n}; {}) = 0", k + 1)));
        }
        let kk = int(k as i64);
        acc += sign(k) * binom(n, k) * ((s.a)(k) + &kk * (s.b)(k)) / den * fk;
    }
    Ok(acc)
}

pub fn forward_ext(s: &InversionScheme, g: &[BigRational], n: usize) -> Result<BigRational> {
    let lam = &s.lambda;
    let mut acc = BigRational::zero();
    for (k, gk) in g.iter().enumerate().take(n + 1) {
        let kk = int(k as i64);
        let den = pochhammer(&(lam + int(n as i64)), k + 1);
        if den.is_zero() {
            return Err(Error::zero_den(format!("(lambda+{n})_{} = 0", k + 1)));
        }
        acc += sign(k)
            * binom(n, k)
            * s.phi(&(lam + &kk), n)
            * s.phi(&(-&kk), n)
            * (lam + int(2 * k as i64))
            / den
            * gk;
    }
    Ok(acc)
}

pub fn inverse_ext(s: &InversionScheme, f: &[BigRational], n: usize) -> Result<BigRational> {
    let lam = &s.lambda;
    let nn = int(n as i64);
    let mut acc = BigRational::zero();
    for (k, fk) in f.iter().enumerate().take(n + 1) {
        let kk = int(k as i64);
        let den = s.phi(&(lam + &nn), k + 1) * s.phi(&(-&nn), k + 1);
        if den.is_zero() {
            return Err(Error::zero_den(format!("extended inverse denominator at n = {n}, k = {k}")));
        }
        let (a, b) = ((s.a)(k), (s.b)(k));
        let weight = (&a + lam * &b + &kk * &b) * (&a - &kk * &b);
        acc += sign(k) * binom(n, k) * weight / den * pochhammer(&(lam + &kk), n) * fk;
    }
    Ok(acc)
}

fn forward(pair: Pair, s: &InversionScheme, g: &[BigRational], n: usize) -> Result<BigRational> {
    match pair {
        Pair::Plain => Ok(forward_gh(s, g, n)),
        Pair::Extended => forward_ext(s, g, n),
    }
}

fn inverse(pair: Pair, s: &InversionScheme, f: &[BigRational], n: usize) -> Result<BigRational> {
    match pair {
        Pair::Plain => inverse_gh(s, f, n),
        Pair::Extended => inverse_ext(s, f, n),
    }
}

/// Applies the forward transform to `g` on `0..=n_max`.
pub fn transform(pair: Pair, s: &InversionScheme, g: &[BigRational], n_max: usize) -> Result<Vec<BigRational>> {
    (0..=n_max).map(|n| forward(pair, s, g, n)).collect()
}

/// Applies the inverse transform to `f` on `0..=n_max`.
pub fn invert(pair: Pair, s: &InversionScheme, f: &[BigRational], n_max: usize) -> Result<Vec<BigRational>> {
    (0..=n_max).map(|n| inverse(pair, s, f, n)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// `g -> f -> g`
    #[serde(rename = "g-f-g")]
    ForwardThenInverse,
    /// `f -> g -> f`
    #[serde(rename = "f-g-f")]
    InverseThenForward,
}

#[derive(Clone, Debug, Serialize)]
pub struct RoundtripFailure {
    pub trial: usize,
    pub pair: Pair,
    pub direction: Direction,
    pub n: usize,
    pub expected: String,
    pub got: String,
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct RoundtripReport {
    pub trials: usize,
    pub checks: usize,
    pub failures: Vec<RoundtripFailure>,
    pub errors: Vec<String>,
}

impl RoundtripReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.errors.is_empty()
    }
}

/// Round-trips random sequences through both directions of each pair.
///
/// With `scheme = None` every trial draws its own random scheme (entries
/// bounded by `max_coeff`); otherwise the given scheme is used throughout
/// and a scheme that divides by zero is reported as an error.
pub fn roundtrip_check(
    scheme: Option<&InversionScheme>,
    pairs: &[Pair],
    n_max: usize,
    trials: usize,
    seed: u64,
    max_coeff: i64,
) -> RoundtripReport {
    let per_trial = crate::par::map_range(trials, |t| {
        let mut rng = SplitMix64::stream(seed, t as u64);
        let mut fails = Vec::new();
        let mut errors = Vec::new();
        let mut checks = 0;
        for &pair in pairs {
            let lambda = (pair == Pair::Extended).then(|| BigRational::new(3.into(), 2.into()));
            let s = match scheme {
                Some(s) => s.clone(),
                None => InversionScheme::random(&mut rng, max_coeff, n_max, lambda, pair),
            };
            if let Err(e) = s.validate(n_max, pair) {
                errors.push(format!("trial {t} ({}): {e}", pair.name()));
                continue;
            }
            let x: Vec<BigRational> = (0..=n_max).map(|_| rng.rational(max_coeff)).collect();
            let runs = [
                (Direction::ForwardThenInverse, transform(pair, &s, &x, n_max).and_then(|f| invert(pair, &s, &f, n_max))),
                (Direction::InverseThenForward, invert(pair, &s, &x, n_max).and_then(|g| transform(pair, &s, &g, n_max))),
            ];
            for (direction, res) in runs {
                match res {
                    Ok(back) => {
                        for n in 0..=n_max {
                            checks += 1;
                            if back[n] != x[n] {
                                fails.push(RoundtripFailure {
                                    trial: t,
                                    pair,
                                    direction,
                                    n,
                                    expected: format_rational(&x[n]),
                                    got: format_rational(&back[n]),
                                });
                            }
                        }
                    }
                    Err(e) => errors.push(format!("trial {t} ({}): {e}", pair.name())),
                }
            }
        }
        (checks, fails, errors)
    });
    let mut report = RoundtripReport {
        trials,
        ..Default::default()
    };
    for (c, f, e) in per_trial {
        report.checks += c;
        report.failures.extend(f);
        report.errors.extend(e);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn binomial_scheme(lambda: BigRational) -> InversionScheme {
        InversionScheme::new(Arc::new(|_| int(1)), Arc::new(|_| int(0)), lambda)
    }

    #[test]
    fn zero_index_is_identity() {
        let mut rng = SplitMix64::new(4);
        let s = InversionScheme::random(&mut rng, 20, 3, Some(rat(3, 2)), Pair::Extended);
        let g = vec![rat(5, 7)];
        assert_eq!(forward_gh(&s, &g, 0), rat(5, 7));
        assert_eq!(inverse_gh(&s, &g, 0).unwrap(), rat(5, 7));
        assert_eq!(forward_ext(&s, &g, 0).unwrap(), rat(5, 7));
        assert_eq!(inverse_ext(&s, &g, 0).unwrap(), rat(5, 7));
    }

    #[test]
    fn alternating_binomial_sum() {
        let s = binomial_scheme(int(1));
        let g = vec![int(1); 8];
        assert_eq!(forward_gh(&s, &g, 0), int(1));
        for n in 1..8 {
            assert_eq!(forward_gh(&s, &g, n), int(0));
        }
    }

    #[test]
    fn binomial_involution() {
        let s = binomial_scheme(int(1));
        let g: Vec<BigRational> = (0..9).map(|i| rat(i * i - 3, i + 2)).collect();
        let f = transform(Pair::Plain, &s, &g, 8).unwrap();
        let twice = transform(Pair::Plain, &s, &f, 8).unwrap();
        assert_eq!(twice, g);
    }

    #[test]
    fn fixed_forward_value() {
        // a_k = k+1, b_k = 1/2, g(k) = 1/(k+1), n = 2:
        // phi(0;2) = 1*2, phi(1;2) = 3/2*5/2, phi(2;2) = 2*3
        // f(2) = 2 - 2*(15/4)/2 + 6/3 = 1/4
        let s = InversionScheme::new(Arc::new(|k| int(k as i64 + 1)), Arc::new(|_| rat(1, 2)), int(1));
        let g = vec![int(1), rat(1, 2), rat(1, 3)];
        assert_eq!(forward_gh(&s, &g, 2), rat(1, 4));
    }

    #[test]
    fn random_roundtrips() {
        let r = roundtrip_check(None, &[Pair::Plain, Pair::Extended], 6, 6, 11, 20);
        assert!(r.passed(), "{r:?}");
        assert_eq!(r.checks, 6 * 2 * 2 * 7);
    }

    #[test]
    fn ill_posed_scheme_is_reported() {
        let s = InversionScheme::new(Arc::new(|k| int(k as i64)), Arc::new(|_| int(-1)), int(1));
        assert!(matches!(s.validate(4, Pair::Plain), Err(Error::ZeroDenominator(_))));
        let r = roundtrip_check(Some(&s), &[Pair::Plain], 4, 1, 1, 20);
        assert!(!r.passed());
        assert_eq!(r.errors.len(), 1);
    }

    #[test]
    fn degenerate_b_zero_extended() {
        let s = InversionScheme::from_tables(vec![rat(2, 3), rat(5, 4), int(-3)], vec![int(0)], rat(3, 2));
        let r = roundtrip_check(Some(&s), &[Pair::Extended], 8, 2, 3, 20);
        assert!(r.passed(), "{r:?}");
    }
}
