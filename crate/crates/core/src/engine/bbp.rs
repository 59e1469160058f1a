//! Hexadecimal digit extraction for pi, and the check that a catalog entry
//! is a rearrangement of one of the two known base-16 digit formulas.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::catalog::CatalogEntry;
use crate::factorial::partial_fractions;
use crate::numeric::BigFloat;
use crate::rational::format_rational;
use crate::{Error, Result};

/// Largest `position + count` accepted by [`bbp_hex_digits`]. Moduli stay
/// below `2^52`, so modular products fit comfortably in `u128`, and the
/// accumulated truncation error stays under `2^-75`.
pub const BBP_MAX_POSITION: u64 = 1 << 48;

fn pow_mod(mut base: u128, mut exp: u64, m: u128) -> u128 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % m;
        }
        base = base * base % m;
        exp >>= 1;
    }
    acc
}

/// `floor(r * 2^128 / m)` for `r < m < 2^64`.
fn fraction(r: u128, m: u128) -> u128 {
    let hi = (r << 64) / m;
    let rem = (r << 64) % m;
    (hi << 64) | ((rem << 64) / m)
}

/// Fractional part of `sum_k 16^(n-k) / (8k + j)` as a 128-bit fixed-point
/// fraction (wrapping arithmetic is arithmetic mod 1).
fn series_fraction(n: u64, j: u64) -> u128 {
    let mut acc = 0u128;
    for k in 0..=n {
        let m = (8 * k + j) as u128;
        acc = acc.wrapping_add(fraction(pow_mod(16, n - k, m), m));
    }
    let mut k = n + 1;
    loop {
        let shift = 4 * (k - n);
        if shift >= 128 {
            break;
        }
        acc = acc.wrapping_add((1u128 << (128 - shift)) / (8 * k + j) as u128);
        k += 1;
    }
    acc
}

/// `count` hexadecimal digits of pi starting `position` places after the
/// point (position 0 is the first fractional digit), without computing the
/// digits before it.
pub fn bbp_hex_digits(position: u64, count: usize) -> Result<String> {
    if !(1..=16).contains(&count) {
        return Err(Error::Range(format!("count must be in 1..=16, got {count}")));
    }
    if position.checked_add(count as u64).is_none_or(|end| end > BBP_MAX_POSITION) {
        return Err(Error::Range(format!(
            "position {position} + count {count} exceeds the spigot limit 2^48"
        )));
    }
    let parts = crate::par::map(&[1u64, 4, 5, 6], |&j| series_fraction(position, j));
    let x = parts[0]
        .wrapping_mul(4)
        .wrapping_sub(parts[1].wrapping_mul(2))
        .wrapping_sub(parts[2])
        .wrapping_sub(parts[3]);
    Ok(format!("{x:032X}")[..count].to_string())
}

/// Hex digits of the fractional part of `x` starting at `position`, by exact
/// base conversion. `x` needs precision beyond `4 (position + count)` bits.
pub fn hex_digits_of(x: &BigFloat, position: u64, count: usize) -> String {
    let bits = 4 * (position + count as u64) as i64;
    let scaled = x.floor_scaled_pow2(bits);
    let digits = scaled.mod_floor(&(BigInt::one() << (4 * count)));
    format!("{:0>width$}", digits.to_str_radix(16).to_uppercase(), width = count)
}

/// The two coefficient sets: `m * pi = sum_k 16^-k sum_r c_r / (8k + r)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BbpFamily {
    /// `pi = sum 16^-k (4/(8k+1) - 2/(8k+4) - 1/(8k+5) - 1/(8k+6))`
    Classic,
    /// `2 pi = sum 16^-k (8/(8k+2) + 4/(8k+3) + 4/(8k+4) - 1/(8k+7))`
    Shifted,
}

impl BbpFamily {
    pub fn multiple(self) -> i64 {
        match self {
            BbpFamily::Classic => 1,
            BbpFamily::Shifted => 2,
        }
    }

    pub fn coefficients(self) -> BTreeMap<u8, BigRational> {
        let v: &[(u8, i64)] = match self {
            BbpFamily::Classic => &[(1, 4), (4, -2), (5, -1), (6, -1)],
            BbpFamily::Shifted => &[(2, 8), (3, 4), (4, 4), (7, -1)],
        };
        v.iter().map(|&(r, c)| (r, BigRational::from_integer(c.into()))).collect()
    }
}

#[derive(Clone, Debug)]
pub struct BbpReport {
    pub id: String,
    pub family: BbpFamily,
    /// Folded coefficients over `8k + r`, rescaled to the family's normalization.
    pub folded: BTreeMap<u8, BigRational>,
}

/// Folds the entry's summand into simple fractions over `8k + r` and checks
/// that it reproduces one family exactly, including the rational constant
/// left over from re-indexing.
pub fn verify_bbp_equivalence(entry: &CatalogEntry) -> Result<BbpReport> {
    let spec = &entry.spec;
    let id = &entry.id;
    if spec.base != 16 {
        return Err(Error::NoMatch(format!("{id}: base {} is not 16", spec.base)));
    }
    let sig = entry.lhs.signature()?;
    let q = match entry.lhs.exact_cofactor() {
        Some(q) if sig.pi == 1 && sig.gamma.is_empty() && !q.is_zero() => q,
        _ => return Err(Error::UnsupportedLhs(format!("{id}: left side is not a rational multiple of pi"))),
    };
    let pf = partial_fractions(&spec.rational_summand()?)?;
    if !pf.polynomial_part.is_zero() {
        return Err(Error::NoMatch(format!("{id}: summand has polynomial part {}", pf.polynomial_part)));
    }
    let sixteen = BigRational::from_integer(16.into());
    let eight = BigRational::from_integer(8.into());
    let start = spec.start as i64;
    let mut folded: BTreeMap<u8, BigRational> = BTreeMap::new();
    let mut constant = spec.additive.clone();
    for (c, pole) in &pf.terms {
        let c = if spec.sign < 0 { -c } else { c.clone() };
        let j = pole * &eight;
        if !j.is_integer() {
            return Err(Error::NoMatch(format!("{id}: pole {} is not on the 8k + r lattice", format_rational(pole))));
        }
        let (s, r) = j.to_integer().div_mod_floor(&BigInt::from(8));
        let (s, r) = (s.to_i64().unwrap_or(i64::MAX), r.to_u8().unwrap());
        if r == 0 {
            return Err(Error::NoMatch(format!("{id}: pole at a multiple of 8")));
        }
        // c/(k+pole) = 8c/(8k+j) = 8c/(8k'+r) with k' = k + s.
        let coeff = &c * &eight * num_traits::pow::Pow::pow(&sixteen, s as i32);
        *folded.entry(r).or_insert_with(BigRational::zero) += &coeff;
        let term = |kp: i64| {
            num_traits::pow::Pow::pow(&sixteen, -kp as i32) / BigRational::from_integer((8 * kp + r as i64).into())
        };
        let first = start + s;
        if first >= 0 {
            for kp in 0..first {
                constant -= &coeff * term(kp);
            }
        } else {
            for kp in first..0 {
                constant += &coeff * term(kp);
            }
        }
    }
    folded.retain(|_, v| !v.is_zero());
    if !constant.is_zero() {
        return Err(Error::NoMatch(format!(
            "{id}: re-indexing leaves rational residue {}",
            format_rational(&constant)
        )));
    }
    let mut residuals = Vec::new();
    for family in [BbpFamily::Classic, BbpFamily::Shifted] {
        let m = BigRational::from_integer(family.multiple().into());
        let normalized: BTreeMap<u8, BigRational> =
            folded.iter().map(|(r, v)| (*r, v * &m / &q)).collect();
        if normalized == family.coefficients() {
            return Ok(BbpReport { id: id.clone(), family, folded: normalized });
        }
        residuals.push(
            normalized
                .iter()
                .map(|(r, v)| format!("{}/(8k+{r})", format_rational(v)))
                .collect::<Vec<_>>()
                .join(" + "),
        );
    }
    Err(Error::NoMatch(format!("{id}: folded coefficients {}", residuals[0])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numeric::pi_reference;

    #[test]
    fn leading_digits() {
        assert_eq!(bbp_hex_digits(0, 16).unwrap(), "243F6A8885A308D3");
        assert_eq!(hex_digits_of(&pi_reference(200), 0, 16), "243F6A8885A308D3");
    }

    #[test]
    fn agrees_with_base_conversion() {
        let pi = pi_reference(4 * 1100);
        for pos in [1u64, 37, 500, 999] {
            assert_eq!(bbp_hex_digits(pos, 8).unwrap(), hex_digits_of(&pi, pos, 8), "position {pos}");
        }
    }

    #[test]
    fn range_is_enforced() {
        assert!(matches!(bbp_hex_digits(BBP_MAX_POSITION, 1), Err(Error::Range(_))));
        assert!(matches!(bbp_hex_digits(0, 17), Err(Error::Range(_))));
        assert!(matches!(bbp_hex_digits(0, 0), Err(Error::Range(_))));
    }
}
