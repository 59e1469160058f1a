//! Dougall's terminating well-poised `7F6` sum, the reformulations leading
//! from it to an infinite-series identity, and the two families of `1/16`-rate
//! series that follow.

mod finite;
mod series;

use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::rational::{format_rational, parse_rational};
use crate::{Error, Result};

pub use finite::{
    binomial_form_f, binomial_form_g, dougall_scheme, omega_closed, random_params, verify_binomial_form,
    verify_dougall, verify_dual_relation, verify_dual_via_inversion, verify_parity_form, wellpoised_sum,
    DougallInstance, IdentityCheck,
};
pub use series::{
    gamma_quotient, lemma_series_sum, lemma_term, limit_trend, normalize_theorem_series, random_series_params,
    theorem_a_polynomial, theorem_a_term, theorem_b_literal, theorem_b_term, theorem_sum, validity, Branch,
    LimitPoint, TermTables, TheoremTerm, Validity,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DougallParams {
    pub a: BigRational,
    pub b: BigRational,
    pub c: BigRational,
    pub d: BigRational,
}

impl DougallParams {
    pub fn new(a: BigRational, b: BigRational, c: BigRational, d: BigRational) -> Self {
        DougallParams { a, b, c, d }
    }

    /// Parses `"a,b,c,d"` with each entry `p/q` or an integer.
    pub fn parse(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Schema(format!("expected four parameters a,b,c,d, got {s:?}")));
        }
        let v = parts.iter().map(|p| parse_rational(p)).collect::<Result<Vec<_>>>()?;
        Ok(Self::from_slice(&v))
    }

    pub fn from_slice(v: &[BigRational]) -> Self {
        DougallParams::new(v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone())
    }

    pub fn to_strings(&self) -> [String; 4] {
        [&self.a, &self.b, &self.c, &self.d].map(format_rational)
    }
}

impl fmt::Display for DougallParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}>", self.to_strings().join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Theorem {
    A,
    B,
}

impl FromStr for Theorem {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "A" | "a" => Ok(Theorem::A),
            "B" | "b" => Ok(Theorem::B),
            other => Err(Error::Schema(format!("theorem must be A or B, got {other:?}"))),
        }
    }
}

impl fmt::Display for Theorem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", match self { Theorem::A => "A", Theorem::B => "B" })
    }
}
