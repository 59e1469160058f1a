//! Constant expressions over rationals, pi, square roots and Gamma at
//! rationals in `(0, 1)`: the left sides of the catalog.
//!
//! Error budget at working precision `w = precision + 32`: rational leaves
//! and pi cost one rounding each, Gamma leaves `2^(8-w)`, and every interior
//! node adds one rounding, so for the shallow trees in the catalog the result
//! is within `2^(c - precision)` with `c` well below 32. Sums of terms with
//! opposite signs can cancel; the guard bits cover the catalog's nested
//! radicals (worst observed loss is under 8 bits).

use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde_json::{json, Map, Value};

use super::{gamma::SpougeTable, pi_reference, BigFloat};
use crate::rational::{format_rational, parse_rational};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum ConstExpr {
    Rational(BigRational),
    Pi,
    Gamma(BigRational),
    Sqrt(Box<ConstExpr>),
    Sum(Vec<ConstExpr>),
    Product(Vec<ConstExpr>),
    Power(Box<ConstExpr>, i32),
}

/// Net transcendental content: the exponent of pi and of each Gamma base in
/// a homogeneous expression.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    pub pi: i32,
    pub gamma: BTreeMap<String, i32>,
}

impl Signature {
    fn is_algebraic(&self) -> bool {
        self.pi == 0 && self.gamma.is_empty()
    }

    fn add(&mut self, other: &Signature, times: i32) {
        self.pi += other.pi * times;
        for (k, v) in &other.gamma {
            *self.gamma.entry(k.clone()).or_insert(0) += v * times;
        }
        self.gamma.retain(|_, v| *v != 0);
    }
}

const GUARD: u32 = 32;

struct EvalCtx {
    pi: Option<BigFloat>,
    spouge: Option<SpougeTable>,
    pi_is_one: bool,
}

impl ConstExpr {
    pub fn rational(x: BigRational) -> Self {
        ConstExpr::Rational(x)
    }

    pub fn pi_pow(e: i32) -> Self {
        if e == 1 {
            ConstExpr::Pi
        } else {
            ConstExpr::Power(Box::new(ConstExpr::Pi), e)
        }
    }

    /// Checks the structural invariants: Gamma arguments in `(0, 1)` and
    /// non-empty sums and products.
    pub fn validate(&self) -> Result<()> {
        match self {
            ConstExpr::Rational(_) | ConstExpr::Pi => Ok(()),
            ConstExpr::Gamma(x) => {
                if x.is_positive() && x < &BigRational::one() {
                    Ok(())
                } else {
                    Err(Error::Schema(format!("gamma argument {x} outside (0, 1)")))
                }
            }
            ConstExpr::Sqrt(c) | ConstExpr::Power(c, _) => c.validate(),
            ConstExpr::Sum(cs) | ConstExpr::Product(cs) => {
                if cs.is_empty() {
                    return Err(Error::Schema("empty sum or product".into()));
                }
                cs.iter().try_for_each(ConstExpr::validate)
            }
        }
    }

    pub fn eval(&self, precision: u32) -> Result<BigFloat> {
        let w = precision + GUARD;
        let mut ctx = EvalCtx {
            pi: None,
            spouge: None,
            pi_is_one: false,
        };
        Ok(self.eval_in(w, &mut ctx)?.with_precision(precision))
    }

    /// Value with pi replaced by 1. For an expression whose signature is
    /// `pi^e` and no Gamma this is the algebraic cofactor `A` in `A pi^e`.
    pub fn eval_algebraic_part(&self, precision: u32) -> Result<BigFloat> {
        let w = precision + GUARD;
        let mut ctx = EvalCtx {
            pi: None,
            spouge: None,
            pi_is_one: true,
        };
        Ok(self.eval_in(w, &mut ctx)?.with_precision(precision))
    }

    /// Exact value with pi replaced by 1, when the expression involves no
    /// square roots or Gamma values.
    pub fn exact_cofactor(&self) -> Option<BigRational> {
        match self {
            ConstExpr::Rational(x) => Some(x.clone()),
            ConstExpr::Pi => Some(BigRational::one()),
            ConstExpr::Gamma(_) | ConstExpr::Sqrt(_) => None,
            ConstExpr::Sum(cs) => cs.iter().map(ConstExpr::exact_cofactor).sum(),
            ConstExpr::Product(cs) => cs.iter().map(ConstExpr::exact_cofactor).product(),
            ConstExpr::Power(c, e) => {
                let v = c.exact_cofactor()?;
                if v.is_zero() && *e < 0 {
                    return None;
                }
                Some(num_traits::pow::Pow::pow(v, *e))
            }
        }
    }

    fn eval_in(&self, w: u32, ctx: &mut EvalCtx) -> Result<BigFloat> {
        Ok(match self {
            ConstExpr::Rational(x) => BigFloat::from_rational(x, w),
            ConstExpr::Pi => {
                if ctx.pi_is_one {
                    BigFloat::one(w)
                } else {
                    ctx.pi.get_or_insert_with(|| pi_reference(w)).clone()
                }
            }
            ConstExpr::Gamma(x) => {
                if ctx.spouge.is_none() {
                    ctx.spouge = Some(SpougeTable::new(w)?);
                }
                ctx.spouge.as_ref().map(|t| t.gamma(x)).unwrap()?
            }
            ConstExpr::Sqrt(c) => {
                let v = c.eval_in(w, ctx)?;
                if v.is_negative() {
                    return Err(Error::Domain(format!(
                        "square root of negative value {}",
                        v.to_sci_string()
                    )));
                }
                v.sqrt()?
            }
            ConstExpr::Sum(cs) => {
                let mut acc = BigFloat::zero(w);
                for c in cs {
                    acc = &acc + &c.eval_in(w, ctx)?;
                }
                acc
            }
            ConstExpr::Product(cs) => {
                let mut acc = BigFloat::one(w);
                for c in cs {
                    acc = &acc * &c.eval_in(w, ctx)?;
                }
                acc
            }
            ConstExpr::Power(c, e) => c.eval_in(w, ctx)?.powi(*e as i64)?,
        })
    }

    /// Signature of a homogeneous expression. Sums must have equal
    /// signatures in every child and square roots must be algebraic.
    pub fn signature(&self) -> Result<Signature> {
        Ok(match self {
            ConstExpr::Rational(_) => Signature::default(),
            ConstExpr::Pi => Signature {
                pi: 1,
                ..Default::default()
            },
            ConstExpr::Gamma(x) => {
                let mut s = Signature::default();
                s.gamma.insert(format_rational(x), 1);
                s
            }
            ConstExpr::Sqrt(c) => {
                let s = c.signature()?;
                if !s.is_algebraic() {
                    return Err(Error::UnsupportedLhs("pi or Gamma under a square root".into()));
                }
                s
            }
            ConstExpr::Sum(cs) => {
                let first = cs[0].signature()?;
                for c in &cs[1..] {
                    if c.signature()? != first {
                        return Err(Error::UnsupportedLhs(
                            "sum mixes different transcendental content".into(),
                        ));
                    }
                }
                first
            }
            ConstExpr::Product(cs) => {
                let mut s = Signature::default();
                for c in cs {
                    s.add(&c.signature()?, 1);
                }
                s
            }
            ConstExpr::Power(c, e) => {
                let mut s = Signature::default();
                s.add(&c.signature()?, *e);
                s
            }
        })
    }

    /// Parses the catalog's tree syntax.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Schema(format!("expression node must be an object: {v}")))?;
        if let Some(r) = obj.get("rat") {
            return Ok(ConstExpr::Rational(parse_rational(str_field(r, "rat")?)?));
        }
        if let Some(e) = obj.get("pi") {
            return Ok(ConstExpr::pi_pow(int_field(e, "pi")?));
        }
        if let Some(g) = obj.get("gamma") {
            let x = parse_rational(str_field(g, "gamma")?)?;
            let e = match obj.get("exp") {
                Some(e) => int_field(e, "exp")?,
                None => 1,
            };
            let leaf = ConstExpr::Gamma(x);
            leaf.validate()?;
            return Ok(if e == 1 {
                leaf
            } else {
                ConstExpr::Power(Box::new(leaf), e)
            });
        }
        if let Some(s) = obj.get("sqrt") {
            return Ok(ConstExpr::Sqrt(Box::new(ConstExpr::from_json(s)?)));
        }
        let op = obj
            .get("op")
            .and_then(Value::as_str)
            .ok_or_else(|| Error::Schema(format!("unrecognised expression node: {v}")))?;
        let args = obj
            .get("args")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::Schema(format!("op {op:?} needs an args array")))?
            .iter()
            .map(ConstExpr::from_json)
            .collect::<Result<Vec<_>>>()?;
        let arity = |n: usize| {
            if args.len() == n {
                Ok(())
            } else {
                Err(Error::Schema(format!("op {op:?} takes {n} argument(s), got {}", args.len())))
            }
        };
        let minus_one = || ConstExpr::Rational(-BigRational::one());
        Ok(match op {
            "add" | "mul" if args.is_empty() => {
                return Err(Error::Schema(format!("op {op:?} with no arguments")))
            }
            "add" => ConstExpr::Sum(args),
            "mul" => ConstExpr::Product(args),
            "sub" => {
                arity(2)?;
                let mut it = args.into_iter();
                let (a, b) = (it.next().unwrap(), it.next().unwrap());
                ConstExpr::Sum(vec![a, ConstExpr::Product(vec![minus_one(), b])])
            }
            "div" => {
                arity(2)?;
                let mut it = args.into_iter();
                let (a, b) = (it.next().unwrap(), it.next().unwrap());
                ConstExpr::Product(vec![a, ConstExpr::Power(Box::new(b), -1)])
            }
            "neg" => {
                arity(1)?;
                ConstExpr::Product(vec![minus_one(), args.into_iter().next().unwrap()])
            }
            "pow" => {
                arity(1)?;
                let e = int_field(
                    obj.get("exp")
                        .ok_or_else(|| Error::Schema("pow needs an exp field".into()))?,
                    "exp",
                )?;
                ConstExpr::Power(Box::new(args.into_iter().next().unwrap()), e)
            }
            other => return Err(Error::Schema(format!("unknown op {other:?}"))),
        })
    }

    /// Tree syntax accepted by [`ConstExpr::from_json`]; subtraction and
    /// division come back as `add`/`mul` with `-1` factors and `pow -1`.
    pub fn to_json(&self) -> Value {
        match self {
            ConstExpr::Rational(x) => json!({ "rat": format_rational(x) }),
            ConstExpr::Pi => json!({ "pi": 1 }),
            ConstExpr::Gamma(x) => json!({ "gamma": format_rational(x), "exp": 1 }),
            ConstExpr::Sqrt(c) => json!({ "sqrt": c.to_json() }),
            ConstExpr::Sum(cs) => json!({ "op": "add", "args": cs.iter().map(Self::to_json).collect::<Vec<_>>() }),
            ConstExpr::Product(cs) => json!({ "op": "mul", "args": cs.iter().map(Self::to_json).collect::<Vec<_>>() }),
            ConstExpr::Power(c, e) => match c.as_ref() {
                ConstExpr::Pi => json!({ "pi": e }),
                ConstExpr::Gamma(x) => json!({ "gamma": format_rational(x), "exp": e }),
                _ => {
                    let mut m = Map::new();
                    m.insert("op".into(), json!("pow"));
                    m.insert("args".into(), json!([c.to_json()]));
                    m.insert("exp".into(), json!(e));
                    Value::Object(m)
                }
            },
        }
    }
}

fn str_field<'a>(v: &'a Value, name: &str) -> Result<&'a str> {
    v.as_str()
        .ok_or_else(|| Error::Schema(format!("{name} must be a \"p/q\" string, got {v}")))
}

fn int_field(v: &Value, name: &str) -> Result<i32> {
    v.as_i64()
        .and_then(|x| i32::try_from(x).ok())
        .ok_or_else(|| Error::Schema(format!("{name} must be an integer, got {v}")))
}

impl fmt::Display for ConstExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstExpr::Rational(x) => {
                if x.is_negative() || !x.is_integer() {
                    write!(f, "({})", format_rational(x))
                } else {
                    write!(f, "{}", format_rational(x))
                }
            }
            ConstExpr::Pi => write!(f, "pi"),
            ConstExpr::Gamma(x) => write!(f, "Gamma({})", format_rational(x)),
            ConstExpr::Sqrt(c) => write!(f, "sqrt({c})"),
            ConstExpr::Sum(cs) => {
                write!(f, "(")?;
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, " + ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            ConstExpr::Product(cs) => {
                for (i, c) in cs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "*")?;
                    }
                    write!(f, "{c}")?;
                }
                Ok(())
            }
            ConstExpr::Power(c, e) => write!(f, "{c}^{e}"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn parse(s: &str) -> ConstExpr {
        ConstExpr::from_json(&serde_json::from_str(s).unwrap()).unwrap()
    }

    #[test]
    fn rational_leaf_is_exact() {
        let e = parse(r#"{"rat":"7/3"}"#);
        let v = e.eval(200).unwrap();
        assert_eq!(v, BigFloat::from_rational(&rat(7, 3), 200));
    }

    #[test]
    fn guillera_constant() {
        let e = parse(r#"{"op":"div","args":[{"rat":"32"},{"pi":2}]}"#);
        assert_eq!(e.eval(128).unwrap().to_decimal_string(8), "3.24227787");
        let s = e.signature().unwrap();
        assert_eq!(s.pi, -2);
        assert!(s.gamma.is_empty());
    }

    #[test]
    fn gamma_signature_and_roundtrip() {
        let e = parse(
            r#"{"op":"div","args":[{"op":"mul","args":[{"rat":"98/3"},{"pi":2}]},{"gamma":"2/3","exp":3}]}"#,
        );
        let s = e.signature().unwrap();
        assert_eq!(s.pi, 2);
        assert_eq!(s.gamma.get("2/3"), Some(&-3));
        let back = ConstExpr::from_json(&e.to_json()).unwrap();
        assert_eq!(back, e);
    }

    #[test]
    fn sqrt_of_negative_is_domain_error() {
        let e = parse(r#"{"sqrt":{"op":"sub","args":[{"rat":"2"},{"rat":"5"}]}}"#);
        assert!(matches!(e.eval(64), Err(Error::Domain(_))));
    }

    #[test]
    fn malformed_nodes() {
        for bad in [
            r#"{"rat":3}"#,
            r#"{"gamma":"3/2","exp":3}"#,
            r#"{"op":"div","args":[{"rat":"1"}]}"#,
            r#"{"op":"frob","args":[]}"#,
            r#"[1]"#,
        ] {
            assert!(ConstExpr::from_json(&serde_json::from_str(bad).unwrap()).is_err(), "{bad}");
        }
    }

    #[test]
    fn pi_under_sqrt_is_unsupported() {
        let e = parse(r#"{"sqrt":{"pi":1}}"#);
        assert!(e.signature().is_err());
    }
}
