//! The bundled table of pi formulas: loading, validation, numeric
//! certification and structural matching against the two series families.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::dougall::{normalize_theorem_series, DougallParams, Theorem};
use crate::engine::{precision_for_digits, sum_series};
use crate::factorial::SeriesSpec;
use crate::numeric::{BigFloat, ConstExpr};
use crate::rational::{format_rational, parse_rational};
use crate::{Error, Result};

const BUILTIN: &str = include_str!("../../data/catalog.json");
const ANOMALIES: &str = include_str!("../../data/anomalies.json");

/// Shape of the left side, one per family of the table.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ConstClass {
    PiInverseSquared,
    PiSquared,
    PiSquaredOverGammaCubed,
    GammaCubedOverPiSquared,
    PiInverse,
    Pi,
    Bbp,
}

impl ConstClass {
    pub fn as_str(self) -> &'static str {
        match self {
            ConstClass::PiInverseSquared => "pi^-2",
            ConstClass::PiSquared => "pi^2",
            ConstClass::PiSquaredOverGammaCubed => "pi^2/Gamma^3",
            ConstClass::GammaCubedOverPiSquared => "Gamma^3/pi^2",
            ConstClass::PiInverse => "pi^-1",
            ConstClass::Pi => "pi",
            ConstClass::Bbp => "BBP",
        }
    }

    /// Expected pi exponent and Gamma-cube exponent (0 for none).
    fn shape(self) -> (i32, i32) {
        match self {
            ConstClass::PiInverseSquared => (-2, 0),
            ConstClass::PiSquared => (2, 0),
            ConstClass::PiSquaredOverGammaCubed => (2, -3),
            ConstClass::GammaCubedOverPiSquared => (-2, 3),
            ConstClass::PiInverse => (-1, 0),
            ConstClass::Pi | ConstClass::Bbp => (1, 0),
        }
    }
}

impl FromStr for ConstClass {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        [
            ConstClass::PiInverseSquared,
            ConstClass::PiSquared,
            ConstClass::PiSquaredOverGammaCubed,
            ConstClass::GammaCubedOverPiSquared,
            ConstClass::PiInverse,
            ConstClass::Pi,
            ConstClass::Bbp,
        ]
        .into_iter()
        .find(|c| c.as_str() == s)
        .ok_or_else(|| Error::Schema(format!("unknown class {s:?}")))
    }
}

impl fmt::Display for ConstClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One entry exactly as stored in the file.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CatalogRecord {
    pub id: String,
    pub class: String,
    pub theorem: String,
    pub params: Vec<String>,
    pub upper: Vec<String>,
    pub lower: Vec<String>,
    pub poly: Vec<String>,
    pub base: u32,
    pub start: usize,
    pub additive: String,
    pub sign: i8,
    pub lhs: Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub attribution: Option<String>,
}

#[derive(Clone, Debug)]
pub struct CatalogEntry {
    pub id: String,
    pub class: ConstClass,
    pub theorem: Theorem,
    pub params: DougallParams,
    pub spec: SeriesSpec,
    pub lhs: ConstExpr,
    pub attribution: Option<String>,
}

fn rationals(xs: &[String]) -> Result<Vec<BigRational>> {
    xs.iter().map(|s| parse_rational(s)).collect()
}

impl CatalogEntry {
    pub fn from_record(r: &CatalogRecord) -> Result<Self> {
        let schema = |e: Error| Error::Schema(format!("{}: {e}", r.id));
        if r.params.len() != 4 {
            return Err(Error::Schema(format!("{}: params must have four entries", r.id)));
        }
        let mut spec = SeriesSpec::new(
            rationals(&r.upper).map_err(schema)?,
            rationals(&r.lower).map_err(schema)?,
            rationals(&r.poly).map_err(schema)?,
            r.base,
        );
        spec.start = r.start;
        spec.additive = parse_rational(&r.additive).map_err(schema)?;
        spec.sign = r.sign;
        let entry = CatalogEntry {
            id: r.id.clone(),
            class: r.class.parse().map_err(schema)?,
            theorem: r.theorem.parse().map_err(schema)?,
            params: DougallParams::from_slice(&rationals(&r.params).map_err(schema)?),
            spec,
            lhs: ConstExpr::from_json(&r.lhs).map_err(schema)?,
            attribution: r.attribution.clone(),
        };
        entry.validate()?;
        Ok(entry)
    }

    pub fn to_record(&self) -> CatalogRecord {
        let strs = |xs: &[BigRational]| xs.iter().map(format_rational).collect();
        CatalogRecord {
            id: self.id.clone(),
            class: self.class.to_string(),
            theorem: self.theorem.to_string(),
            params: self.params.to_strings().to_vec(),
            upper: strs(&self.spec.quotient.upper),
            lower: strs(&self.spec.quotient.lower),
            poly: strs(&self.spec.poly),
            base: self.spec.base,
            start: self.spec.start,
            additive: format_rational(&self.spec.additive),
            sign: self.spec.sign,
            lhs: self.lhs.to_json(),
            attribution: self.attribution.clone(),
        }
    }

    /// Series validity, an evaluable left side, and a left side whose
    /// transcendental content fits the declared class.
    pub fn validate(&self) -> Result<()> {
        let violation = |reason: String| Error::InvariantViolation { id: self.id.clone(), reason };
        self.spec.validate().map_err(|e| violation(e.to_string()))?;
        self.lhs.validate().map_err(|e| violation(e.to_string()))?;
        let sig = self.lhs.signature().map_err(|e| violation(e.to_string()))?;
        let (pi, cube) = self.class.shape();
        let gamma_ok = match cube {
            0 => sig.gamma.is_empty(),
            _ => {
                sig.gamma.len() == 1
                    && sig
                        .gamma
                        .iter()
                        .all(|(base, e)| (base == "1/3" || base == "2/3") && *e == cube)
            }
        };
        if sig.pi != pi || !gamma_ok {
            return Err(violation(format!(
                "left side {} does not have the shape of class {}",
                self.lhs, self.class
            )));
        }
        Ok(())
    }
}

/// Parses and validates a catalog document (a JSON array of entries).
pub fn load_catalog(source: &str) -> Result<Vec<CatalogEntry>> {
    let records: Vec<CatalogRecord> =
        serde_json::from_str(source).map_err(|e| Error::Schema(e.to_string()))?;
    let mut seen = BTreeSet::new();
    for r in &records {
        if !seen.insert(r.id.as_str()) {
            return Err(Error::Schema(format!("duplicate id {}", r.id)));
        }
    }
    records.iter().map(CatalogEntry::from_record).collect()
}

/// Serializes entries back to the file format.
pub fn catalog_to_json(entries: &[CatalogEntry]) -> String {
    let records: Vec<CatalogRecord> = entries.iter().map(CatalogEntry::to_record).collect();
    serde_json::to_string_pretty(&records).expect("records serialize")
}

pub fn builtin_catalog() -> Vec<CatalogEntry> {
    load_catalog(BUILTIN).expect("bundled catalog is valid")
}

pub fn builtin_catalog_source() -> &'static str {
    BUILTIN
}

pub fn find<'a>(entries: &'a [CatalogEntry], id: &str) -> Result<&'a CatalogEntry> {
    entries
        .iter()
        .find(|e| e.id == id)
        .ok_or_else(|| Error::UnknownEntry(id.to_string()))
}

/// A known irregularity in the source table, kept beside the data rather
/// than patched into it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Anomaly {
    pub id: Option<String>,
    pub check: String,
    pub note: String,
}

#[derive(Deserialize)]
struct AnomalyFile {
    anomalies: Vec<Anomaly>,
}

pub fn builtin_anomalies() -> Vec<Anomaly> {
    serde_json::from_str::<AnomalyFile>(ANOMALIES)
        .expect("bundled anomalies file is valid")
        .anomalies
}

#[derive(Clone, Debug)]
pub struct EntryCheck {
    pub abs_error: BigFloat,
    pub error_bound: BigFloat,
    pub terms: usize,
    pub passed: bool,
}

/// Compares the left side with the series to `digits` decimal digits.
pub fn verify_entry(entry: &CatalogEntry, digits: u32) -> Result<EntryCheck> {
    let prec = precision_for_digits(digits);
    let sum = sum_series(&entry.spec, digits)?;
    let lhs = entry.lhs.eval(prec)?;
    let abs_error = (&lhs - &sum.value).abs().with_precision(64);
    let scale = BigFloat::from_bigint(num_traits::pow(BigInt::from(10), digits as usize), 64);
    let passed = (&abs_error * &scale) < BigFloat::one(64);
    Ok(EntryCheck { abs_error, error_bound: sum.error_bound, terms: sum.terms, passed })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchMode {
    /// Proportional term by term with an exact rational scale.
    Exact,
    /// Proportional in the tail, whole sums equal to 60 digits.
    Numeric,
}

#[derive(Clone, Debug)]
pub struct MatchReport {
    pub mode: MatchMode,
    pub scale: BigRational,
    pub canonical: SeriesSpec,
}

/// Last index compared term by term.
const MATCH_HORIZON: usize = 50;

/// Relates the entry to the canonical series of its parameter box and
/// theorem: `entry = scale * canonical`, first exactly per term (with
/// leading terms settled through the additive constants), then through
/// the tail ratio and a numeric comparison of the full sums.
pub fn match_to_theorem(entry: &CatalogEntry) -> Result<MatchReport> {
    let id = &entry.id;
    let canonical = normalize_theorem_series(&entry.params, entry.theorem)
        .map_err(|e| Error::NoMatch(format!("{id}: theorem {} series unavailable: {e}", entry.theorem)))?;
    let spec = &entry.spec;
    let from = spec.start.max(canonical.start);
    let below_start_zero = |s: &SeriesSpec| -> Result<Vec<BigRational>> {
        let mut t = s.terms(MATCH_HORIZON)?;
        t.iter_mut().take(s.start).for_each(|x| *x = BigRational::zero());
        Ok(t)
    };
    let cat = below_start_zero(spec)?;
    let can = below_start_zero(&canonical)?;
    let first = (from..=MATCH_HORIZON)
        .find(|&k| !cat[k].is_zero() && !can[k].is_zero())
        .ok_or(Error::NoNonzeroTerm)?;
    let scale = &cat[first] / &can[first];
    let proportional = (from..=MATCH_HORIZON).all(|k| cat[k] == &scale * &can[k]);
    if proportional {
        let head: BigRational = &spec.additive + cat[..from].iter().sum::<BigRational>();
        let canonical_head: BigRational = &canonical.additive + can[..from].iter().sum::<BigRational>();
        if head == &scale * canonical_head {
            return Ok(MatchReport { mode: MatchMode::Exact, scale, canonical });
        }
    }
    // Re-indexed or partially summed entries: proportional tails, equal sums.
    let tail = 40..=MATCH_HORIZON;
    if tail.clone().any(|k| can[k].is_zero()) {
        return Err(Error::NoMatch(format!("{id}: canonical terms vanish in the tail")));
    }
    let scale = &cat[40] / &can[40];
    if !tail.clone().all(|k| cat[k] == &scale * &can[k]) {
        return Err(Error::NoMatch(format!("{id}: terms are not proportional to the theorem {} series", entry.theorem)));
    }
    let digits = 60;
    let lhs = sum_series(spec, digits)?.value;
    let rhs = &sum_series(&canonical, digits)?.value * &BigFloat::from_rational(&scale, precision_for_digits(digits));
    let diff = (&lhs - &rhs).abs();
    let tol = BigFloat::from_bigint(num_traits::pow(BigInt::from(10), digits as usize), 64);
    if (&diff * &tol) < BigFloat::one(64) {
        Ok(MatchReport { mode: MatchMode::Numeric, scale, canonical })
    } else {
        Err(Error::NoMatch(format!(
            "{id}: proportional tails with scale {} but sums differ by {}",
            format_rational(&scale),
            diff.to_sci_string()
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn bundled_catalog_loads() {
        let c = builtin_catalog();
        assert_eq!(c.len(), 100);
        let g = find(&c, "s3.1-ex1").unwrap();
        assert_eq!(g.spec.poly, vec![int(3), int(34), int(120)]);
        assert_eq!(g.class, ConstClass::PiInverseSquared);
        assert!(find(&c, "nope").is_err());
    }

    #[test]
    fn round_trip_through_json() {
        let c = builtin_catalog();
        let again = load_catalog(&catalog_to_json(&c)).unwrap();
        assert_eq!(again.len(), c.len());
        assert_eq!(again[17].spec, c[17].spec);
        assert_eq!(again[17].lhs, c[17].lhs);
    }

    #[test]
    fn lower_pole_is_rejected() {
        let mut v: Vec<Value> = serde_json::from_str(BUILTIN).unwrap();
        v[0]["lower"][0] = Value::from("-2");
        let err = load_catalog(&Value::Array(v).to_string()).unwrap_err();
        assert!(matches!(err, Error::InvariantViolation { ref id, .. } if id == "s3.1-ex1"));
    }

    #[test]
    fn class_mismatch_is_rejected() {
        let mut v: Vec<Value> = serde_json::from_str(BUILTIN).unwrap();
        v[0]["class"] = Value::from("pi^2");
        assert!(matches!(
            load_catalog(&Value::Array(v).to_string()),
            Err(Error::InvariantViolation { .. })
        ));
    }

    #[test]
    fn guillera_certifies_and_matches() {
        let c = builtin_catalog();
        let g = find(&c, "s3.1-ex1").unwrap();
        let v = verify_entry(g, 100).unwrap();
        assert!(v.passed, "error {}", v.abs_error.to_sci_string());
        let m = match_to_theorem(g).unwrap();
        assert_eq!(m.mode, MatchMode::Exact);
        assert_eq!(m.scale, int(32));
    }

    #[test]
    fn additive_entry_matches() {
        let c = builtin_catalog();
        let e = find(&c, "s3.2-ex4").unwrap();
        assert_eq!((e.spec.start, e.spec.additive.clone()), (1, int(1)));
        assert!(match_to_theorem(e).is_ok());
    }

    #[test]
    fn wrong_theorem_does_not_match() {
        let c = builtin_catalog();
        let mut g = find(&c, "s3.1-ex1").unwrap().clone();
        g.theorem = Theorem::B;
        assert!(matches!(match_to_theorem(&g), Err(Error::NoMatch(_))));
    }

    #[test]
    fn corrupted_poly_fails_verification() {
        let c = builtin_catalog();
        let mut g = find(&c, "s3.1-ex1").unwrap().clone();
        g.spec.poly[0] += rat(1, 1);
        let v = verify_entry(&g, 30).unwrap();
        assert!(!v.passed);
        assert!(v.abs_error.log2_abs() > -4.0);
    }

    #[test]
    fn anomalies_reference_real_entries() {
        let c = builtin_catalog();
        for a in builtin_anomalies() {
            if let Some(id) = &a.id {
                assert!(find(&c, id).is_ok(), "{id}");
            }
        }
    }
}
