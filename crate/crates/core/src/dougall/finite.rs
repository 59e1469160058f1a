//! Terminating identities: Dougall's sum, its parity-shifted form, the
//! binomial-sum form and the dual relation obtained by inversion.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::DougallParams;
use crate::factorial::pochhammer;
use crate::inversion::{forward_ext, inverse_ext, InversionScheme};
use crate::rational::{binomial, format_rational};
use crate::rng::SplitMix64;
use crate::{Error, Result};

fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `prod (u)_n / prod (l)_n`, failing on a vanishing denominator.
fn quot(upper: &[BigRational], lower: &[BigRational], n: usize, what: &str) -> Result<BigRational> {
    let den: BigRational = lower.iter().map(|l| pochhammer(l, n)).product();
    if den.is_zero() {
        return Err(Error::zero_den(format!("{what}: lower factor vanishes at index {n}")));
    }
    Ok(upper.iter().map(|u| pochhammer(u, n)).product::<BigRational>() / den)
}

/// Both sides of an exact identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub lhs: BigRational,
    pub rhs: BigRational,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.lhs == self.rhs
    }

    pub fn describe(&self) -> String {
        format!("lhs = {}, rhs = {}", format_rational(&self.lhs), format_rational(&self.rhs))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DougallInstance {
    #[serde(skip)]
    pub params: DougallParams,
    pub n: usize,
}

impl DougallInstance {
    pub fn new(params: DougallParams, n: usize) -> Self {
        DougallInstance { params, n }
    }

    /// `e = 1 + 2a + n - b - c - d`, so the series is 2-balanced by construction.
    pub fn e(&self) -> BigRational {
        let p = &self.params;
        int(1) + int(2) * &p.a + int(self.n as i64) - &p.b - &p.c - &p.d
    }
}

/// The closed form `Omega_n(a; b, c, d)`.
pub fn omega_closed(p: &DougallParams, n: usize) -> Result<BigRational> {
    let one = int(1);
    let (a, b, c, d) = (&p.a, &p.b, &p.c, &p.d);
    quot(
        &[&one + a, &one + a - b - c, &one + a - b - d, &one + a - c - d],
        &[&one + a - b, &one + a - c, &one + a - d, &one + a - b - c - d],
        n,
        "Omega",
    )
}

/// The terminating very-well-poised sum.
pub fn wellpoised_sum(inst: &DougallInstance) -> Result<BigRational> {
    let p = &inst.params;
    if p.a.is_zero() {
        return Err(Error::ZeroA);
    }
    let n = inst.n;
    let one = int(1);
    let e = inst.e();
    let (a, b, c, d) = (&p.a, &p.b, &p.c, &p.d);
    let upper = [a.clone(), b.clone(), c.clone(), d.clone(), e.clone(), int(-(n as i64))];
    let lower = [
        one.clone(),
        &one + a - b,
        &one + a - c,
        &one + a - d,
        &one + a - &e,
        &one + a + int(n as i64),
    ];
    // Running products avoid recomputing each Pochhammer from scratch.
    let mut num = BigRational::one();
    let mut den = BigRational::one();
    let mut sum = BigRational::zero();
    for k in 0..=n {
        if k > 0 {
            let kk = int(k as i64 - 1);
            for u in &upper {
                num *= u + &kk;
            }
            for l in &lower {
                den *= l + &kk;
            }
        }
        if den.is_zero() {
            return Err(Error::zero_den(format!("well-poised sum: lower factor vanishes at k = {k}")));
        }
        sum += (a + int(2 * k as i64)) / a * &num / &den;
    }
    Ok(sum)
}

pub fn verify_dougall(p: &DougallParams, n: usize) -> Result<IdentityCheck> {
    Ok(IdentityCheck {
        lhs: omega_closed(p, n)?,
        rhs: wellpoised_sum(&DougallInstance::new(p.clone(), n))?,
    })
}

/// `Omega_n(a; b + floor(n/2), c, d + floor((n+1)/2))` against its
/// three-quotient product form.
pub fn verify_parity_form(p: &DougallParams, n: usize) -> Result<IdentityCheck> {
    let (h, hh) = (n / 2, n.div_ceil(2));
    let one = int(1);
    let (a, b, c, d) = (&p.a, &p.b, &p.c, &p.d);
    let shifted = DougallParams::new(a.clone(), b + int(h as i64), c.clone(), d + int(hh as i64));
    let lhs = omega_closed(&shifted, n)?;
    let rhs = quot(&[&one + a - c - d, b + c - a], &[&one + a - d, b - a], h, "parity form")?
        * quot(&[&one + a, b + d - a], &[&one + a - c, b + c + d - a], n, "parity form")?
        * quot(&[&one + a - b - c, c + d - a], &[&one + a - b, d - a], hh, "parity form")?;
    Ok(IdentityCheck { lhs, rhs })
}

/// The inversion scheme matching Dougall's sum: `lambda = a` and
/// `phi(x; n) = (b-a+x)_{floor(n/2)} (d-a+x)_{floor((n+1)/2)}`.
pub fn dougall_scheme(p: &DougallParams) -> InversionScheme {
    let (a, b, d) = (p.a.clone(), p.b.clone(), p.d.clone());
    let seq_a = Arc::new(move |k: usize| {
        if k.is_multiple_of(2) {
            &d - &a + int((k / 2) as i64)
        } else {
            &b - &a + int(((k - 1) / 2) as i64)
        }
    });
    InversionScheme::new(seq_a, Arc::new(|_| BigRational::one()), p.a.clone())
}

/// Right side `f(n)` of the binomial-sum form.
pub fn binomial_form_f(p: &DougallParams, n: usize) -> Result<BigRational> {
    let (h, hh) = (n / 2, n.div_ceil(2));
    let one = int(1);
    let (a, b, c, d) = (&p.a, &p.b, &p.c, &p.d);
    Ok(quot(&[&one + a - c - d, b.clone(), b + c - a], &[&one + a - d], h, "f")?
        * quot(&[a.clone(), b + d - a], &[&one + a - c, b + c + d - a], n, "f")?
        * quot(&[&one + a - b - c, d.clone(), c + d - a], &[&one + a - b], hh, "f")?)
}

/// Summand sequence `g(k)` of the binomial-sum form.
pub fn binomial_form_g(p: &DougallParams, k: usize) -> Result<BigRational> {
    let one = int(1);
    let (a, b, c, d) = (&p.a, &p.b, &p.c, &p.d);
    quot(
        &[a.clone(), b.clone(), c.clone(), d.clone(), &one + int(2) * a - b - c - d],
        &[&one + a - b, &one + a - c, &one + a - d, b + c + d - a],
        k,
        "g",
    )
}

/// The binomial-sum form as the forward extended Gould–Hsu transform.
pub fn verify_binomial_form(p: &DougallParams, n: usize) -> Result<IdentityCheck> {
    let s = dougall_scheme(p);
    let g = (0..=n).map(|k| binomial_form_g(p, k)).collect::<Result<Vec<_>>>()?;
    Ok(IdentityCheck {
        lhs: forward_ext(&s, &g, n)?,
        rhs: binomial_form_f(p, n)?,
    })
}

/// The dual relation as the inverse extended transform: recovers `g(n)`.
pub fn verify_dual_via_inversion(p: &DougallParams, n: usize) -> Result<IdentityCheck> {
    let s = dougall_scheme(p);
    let f = (0..=n).map(|k| binomial_form_f(p, k)).collect::<Result<Vec<_>>>()?;
    Ok(IdentityCheck {
        lhs: binomial_form_g(p, n)?,
        rhs: inverse_ext(&s, &f, n)?,
    })
}

/// The dual relation written out by parity of the summation index.
pub fn verify_dual_relation(p: &DougallParams, n: usize) -> Result<IdentityCheck> {
    let one = int(1);
    let (a, b, c, d) = (&p.a, &p.b, &p.c, &p.d);
    let nn = int(n as i64);
    let lhs = quot(
        &[b.clone(), c.clone(), d.clone(), &one + int(2) * a - b - c - d],
        &[&one + a - b, &one + a - c, &one + a - d, b + c + d - a],
        n,
        "dual relation",
    )?;
    let bn = b + &nn;
    let ban = b - a - &nn;
    let dn = d + &nn;
    let dan = d - a - &nn;
    let an = a + &nn;
    let left = [&one + a - c - d, b.clone(), b + c - a];
    let right = [&one + a - b - c, d.clone(), c + d - a];
    let bda = b + d - a;
    let two = [&one + a - c, b + c + d - a];
    let mut rhs = BigRational::zero();
    for k in 0..=n / 2 {
        let kk = int(k as i64);
        let den = pochhammer(&bn, k) * pochhammer(&ban, k) * pochhammer(&dn, k + 1) * pochhammer(&dan, k + 1);
        if den.is_zero() {
            return Err(Error::zero_den(format!("dual relation: even denominator vanishes at k = {k}")));
        }
        rhs += BigRational::from_integer(binomial(n, 2 * k)) * (d + int(3) * &kk) * (d - a - &kk)
            * pochhammer(&an, 2 * k)
            / den
            * quot(&left, &[&one + a - d], k, "dual relation")?
            * quot(&right, &[&one + a - b], k, "dual relation")?
            * quot(std::slice::from_ref(&bda), &two, 2 * k, "dual relation")?;
        if 2 * k < n {
            let den =
                pochhammer(&bn, k + 1) * pochhammer(&ban, k + 1) * pochhammer(&dn, k + 1) * pochhammer(&dan, k + 1);
            if den.is_zero() {
                return Err(Error::zero_den(format!("dual relation: odd denominator vanishes at k = {k}")));
            }
            rhs -= BigRational::from_integer(binomial(n, 2 * k + 1))
                * (b + int(3) * &kk + &one)
                * (b - a - &kk - &one)
                * pochhammer(&an, 2 * k + 1)
                / den
                * quot(&left, &[&one + a - d], k, "dual relation")?
                * quot(&right, &[&one + a - b], k + 1, "dual relation")?
                * quot(std::slice::from_ref(&bda), &two, 2 * k + 1, "dual relation")?;
        }
    }
    Ok(IdentityCheck { lhs, rhs })
}

/// Random parameters with entries `p/q`, `|p|, q <= max`, redrawn until
/// `accept` succeeds (used to skip poles in the tested range).
pub fn random_params(rng: &mut SplitMix64, max: i64, accept: impl Fn(&DougallParams) -> bool) -> DougallParams {
    loop {
        let p = DougallParams::new(rng.rational(max), rng.rational(max), rng.rational(max), rng.rational(max));
        if accept(&p) {
            return p;
        }
    }
}
