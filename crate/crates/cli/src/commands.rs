use std::collections::BTreeSet;

use dougall_pi::catalog::{
    builtin_anomalies, builtin_catalog_source, find, load_catalog, match_to_theorem, verify_entry, CatalogEntry,
    ConstClass,
};
use dougall_pi::dougall::{
    gamma_quotient, lemma_series_sum, normalize_theorem_series, random_params, random_series_params, theorem_sum,
    validity, verify_binomial_form, verify_dougall, verify_dual_relation, verify_dual_via_inversion,
    verify_parity_form, DougallParams, IdentityCheck, Theorem, Validity,
};
use dougall_pi::engine::{
    bbp_hex_digits, compute_pi_via, convergence_rate, hex_digits_of, precision_for_digits, sum_series,
    verify_bbp_equivalence,
};
use dougall_pi::inversion::{roundtrip_check, InversionScheme, Pair};
use dougall_pi::numeric::{bits_for_digits, factorial_growth_ratio, pi_reference, BigFloat};
use dougall_pi::rational::{format_rational, parse_rational};
use dougall_pi::rng::SplitMix64;
use dougall_pi::{par, BigRational, Result};
use num_traits::{One, Zero};

use crate::report::{Item, RunReport, Status};
use crate::{
    BbpArgs, BbpEquivArgs, CatalogArgs, Cli, Command, DeriveArgs, DougallArgs, Inject, InversionArgs, LemmaArgs,
    LimitArgs, PiArgs, RateArgs, TrialArgs, UsageError, Verify,
};

type Run = std::result::Result<(), UsageError>;
type IdentityFn = fn(&DougallParams, usize) -> Result<IdentityCheck>;

pub fn run(cli: &Cli, report: &mut RunReport) -> Run {
    match &cli.command {
        Command::Verify(v) => match v {
            Verify::Dougall(a) => dougall(cli, a, report),
            Verify::Inversion(a) => inversion(cli, a, report),
            Verify::Chain(a) => chain(cli, a, report),
            Verify::Lemma(a) => lemma(a, report),
            Verify::Limit(a) => limit(a, report),
            Verify::Catalog(a) => catalog(cli, a, report),
            Verify::Bbp(a) => bbp_equivalence(cli, a, report),
        },
        Command::Derive(a) => derive(a, report),
        Command::Pi(a) => pi(cli, a, report),
        Command::Bbp(a) => bbp(a, report),
        Command::Rate(a) => rate(cli, a, report),
    }
}

fn load(cli: &Cli) -> std::result::Result<Vec<CatalogEntry>, UsageError> {
    let text = match &cli.catalog {
        Some(path) => std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?,
        None => builtin_catalog_source().to_string(),
    };
    Ok(load_catalog(&text)?)
}

fn tolerance(digits: u32) -> BigFloat {
    BigFloat::one(64).checked_div(&BigFloat::from_bigint(num_traits::pow(10.into(), digits as usize), 64)).unwrap()
}

/// Applies the injected sign fault, if any, to an identity check.
fn judged(cli: &Cli, c: IdentityCheck) -> IdentityCheck {
    match cli.inject {
        Some(Inject::SignFlip) => IdentityCheck { lhs: c.lhs, rhs: -c.rhs },
        _ => c,
    }
}

/// Runs `checks` for `n = 0..=nmax` on random parameters, redrawing boxes
/// that hit a pole; reports the first counterexample per trial.
fn identity_trials(
    cli: &Cli,
    report: &mut RunReport,
    trials: usize,
    nmax: usize,
    seed: u64,
    max_coeff: i64,
    checks: &[(&str, IdentityFn)],
) {
    report.seed = Some(seed);
    let items = par::map_range(trials, |t| {
        let mut rng = SplitMix64::stream(seed, t as u64);
        let p = random_params(&mut rng, max_coeff, |p| {
            checks.iter().all(|(_, f)| (0..=nmax).all(|n| f(p, n).is_ok()))
        });
        let results: Vec<_> = checks
            .iter()
            .flat_map(|(name, f)| (0..=nmax).map(|n| (*name, n, f(&p, n).expect("accepted box"))).collect::<Vec<_>>())
            .collect();
        let id = format!("trial-{t}");
        let count = results.len();
        match results.into_iter().find_map(|(name, n, c)| {
            let c = judged(cli, c);
            (!c.passed()).then(|| format!("{name} at n = {n}: {}", c.describe()))
        }) {
            None => Item::pass(id, format!("{p}: {count} exact checks")),
            Some(msg) => Item::fail(id, format!("{p}"), Some(msg)),
        }
    });
    items.into_iter().for_each(|i| report.push(i));
}

fn dougall(cli: &Cli, a: &DougallArgs, report: &mut RunReport) -> Run {
    identity_trials(cli, report, a.trials, a.nmax, a.seed, a.max_coeff, &[("dougall", verify_dougall)]);
    Ok(())
}

fn chain(cli: &Cli, a: &TrialArgs, report: &mut RunReport) -> Run {
    identity_trials(
        cli,
        report,
        a.trials,
        a.nmax,
        a.seed,
        a.max_coeff,
        &[
            ("parity form", verify_parity_form),
            ("binomial form", verify_binomial_form),
            ("dual by inversion", verify_dual_via_inversion),
            ("dual relation", verify_dual_relation),
        ],
    );
    Ok(())
}

fn inversion(cli: &Cli, a: &InversionArgs, report: &mut RunReport) -> Run {
    report.seed = Some(a.seed);
    let zero = (cli.inject == Some(Inject::ZeroScheme))
        .then(|| InversionScheme::from_tables(vec![BigRational::zero()], vec![BigRational::zero()], BigRational::one()));
    let mut pairs: Vec<Pair> = Vec::new();
    for &p in &a.pairs {
        if !pairs.contains(&p.into()) {
            pairs.push(p.into());
        }
    }
    for pair in pairs {
        let r = roundtrip_check(zero.as_ref(), &[pair], a.nmax, a.trials, a.seed, a.max_coeff);
        let detail = format!("{} trials, {} exact comparisons", r.trials, r.checks);
        let item = if r.passed() {
            Item::pass(pair.name(), detail)
        } else {
            let first = r
                .failures
                .first()
                .map(|f| format!("trial {} n = {}: expected {}, got {}", f.trial, f.n, f.expected, f.got))
                .or_else(|| r.errors.first().cloned());
            Item::fail(
                pair.name(),
                format!("{detail}, {} mismatches, {} errors", r.failures.len(), r.errors.len()),
                first,
            )
        };
        report.push(item);
    }
    Ok(())
}

fn lemma(a: &LemmaArgs, report: &mut RunReport) -> Run {
    report.seed = Some(a.seed);
    let prec = precision_for_digits(a.digits).max(400);
    let tol = tolerance(a.digits);
    let rows = par::map_range(a.trials, |t| {
        let mut rng = SplitMix64::stream(a.seed, t as u64);
        let p = random_series_params(&mut rng);
        let cases: [(&str, Option<Theorem>); 3] = [("lemma", None), ("A", Some(Theorem::A)), ("B", Some(Theorem::B))];
        cases
            .iter()
            .map(|&(name, th)| {
                let id = format!("trial-{t}-{name}");
                let lhs = gamma_quotient(&p, th, prec);
                let rhs = match th {
                    None => lemma_series_sum(&p, a.terms, prec),
                    Some(th) => theorem_sum(&p, th, a.terms, prec),
                };
                match (lhs, rhs) {
                    (Ok(l), Ok(r)) => {
                        let err = (&l - &r).abs();
                        Item::check(id, err < tol, format!("{p}: |difference| = {}", err.to_sci_string()))
                    }
                    (Err(e), _) | (_, Err(e)) => Item::fail(id, format!("{p}"), Some(e.to_string())),
                }
            })
            .collect::<Vec<_>>()
    });
    rows.into_iter().flatten().for_each(|i| report.push(i));
    Ok(())
}

fn limit(a: &LimitArgs, report: &mut RunReport) -> Run {
    for xs in &a.x {
        let x = parse_rational(xs)?;
        for &n in &a.n {
            let id = format!("x={}, n={n}", format_rational(&x));
            let item = match factorial_growth_ratio(&x, n, 128) {
                Ok(r) => {
                    let dev = (r.to_f64() - 1.0).abs();
                    Item::check(id, dev < 1.0 / n as f64, format!("|ratio - 1| = {dev:.3e}"))
                }
                Err(e) => Item::fail(id, "", Some(e.to_string())),
            };
            report.push(item);
        }
    }
    Ok(())
}

fn select<'a>(entries: &'a [CatalogEntry], id: &Option<String>) -> std::result::Result<Vec<&'a CatalogEntry>, UsageError> {
    Ok(match id {
        Some(id) => vec![find(entries, id)?],
        None => entries.iter().collect(),
    })
}

fn catalog(cli: &Cli, a: &CatalogArgs, report: &mut RunReport) -> Run {
    if a.digits < 10 {
        return Err(UsageError(format!("--digits must be at least 10, got {}", a.digits)));
    }
    let entries = load(cli)?;
    let chosen = select(&entries, &a.id)?;
    let known: BTreeSet<String> = builtin_anomalies().into_iter().filter_map(|x| x.id).collect();
    let tol = tolerance(a.digits);
    let results = par::map(&chosen, |e| {
        let numeric = verify_entry(e, a.digits);
        let matched = match_to_theorem(e);
        (numeric, matched)
    });
    let mut worst: Option<BigFloat> = None;
    for (e, (numeric, matched)) in chosen.iter().zip(results) {
        let mut problems = Vec::new();
        let mut detail = Vec::new();
        match numeric {
            Ok(c) => {
                detail.push(format!("|lhs - sum| = {}", c.abs_error.to_sci_string()));
                if !c.passed || c.abs_error >= tol {
                    problems.push(format!("numeric check failed at {} digits", a.digits));
                }
                if worst.as_ref().is_none_or(|w| c.abs_error > *w) {
                    worst = Some(c.abs_error.clone());
                }
            }
            Err(err) => problems.push(err.to_string()),
        }
        match matched {
            Ok(m) => detail.push(format!(
                "theorem {} {:?} match, scale {}",
                e.theorem,
                m.mode,
                format_rational(&m.scale)
            )),
            Err(err) => problems.push(err.to_string()),
        }
        let mut item = if problems.is_empty() {
            Item::pass(&e.id, detail.join("; "))
        } else {
            Item::fail(&e.id, detail.join("; "), Some(problems.join("; ")))
        };
        if item.status == Status::Fail && known.contains(&e.id) {
            item.status = Status::Anomaly;
        }
        report.push(item);
    }
    report.worst_error = worst.map(|w| w.to_sci_string());
    Ok(())
}

fn bbp_equivalence(cli: &Cli, a: &BbpEquivArgs, report: &mut RunReport) -> Run {
    let entries = load(cli)?;
    let chosen: Vec<_> = select(&entries, &a.id)?
        .into_iter()
        .filter(|e| a.id.is_some() || e.class == ConstClass::Bbp)
        .collect();
    for e in chosen {
        report.push(match verify_bbp_equivalence(e) {
            Ok(r) => Item::pass(
                &e.id,
                format!(
                    "{:?} family: {}",
                    r.family,
                    signed_sum(r.folded.iter().map(|(j, c)| (c.clone(), format!("/(8k+{j})"))))
                ),
            ),
            Err(err) => Item::fail(&e.id, "", Some(err.to_string())),
        });
    }
    Ok(())
}

fn derive(a: &DeriveArgs, report: &mut RunReport) -> Run {
    let theorem: Theorem = a.theorem.parse()?;
    let p = DougallParams::parse(&a.params)?;
    let spec = match normalize_theorem_series(&p, theorem) {
        Ok(s) => s,
        Err(e) => {
            report.push(Item::fail(format!("theorem {theorem}"), format!("{p}"), Some(e.to_string())));
            return Ok(());
        }
    };
    report.output.push(format!("theorem {theorem} at {p}"));
    report.output.push(format!("series: {spec}"));
    if let Validity::Unverified(why) = validity(&p) {
        report.output.push(format!("domain: unverified ({why})"));
    }
    match spec.terms(a.terms.saturating_sub(1)) {
        Ok(ts) => {
            for (k, t) in ts.iter().enumerate() {
                report.output.push(format!("term({k}) = {}", format_rational(t)));
            }
        }
        Err(e) => report.push(Item::fail("terms", "", Some(e.to_string()))),
    }
    if let Some(d) = a.digits {
        let item = match (sum_series(&spec, d), gamma_quotient(&p, Some(theorem), precision_for_digits(d))) {
            (Ok(s), Ok(g)) => {
                let err = (&s.value - &g).abs();
                report.output.push(format!("sum = {}", s.value.to_decimal_string(d)));
                Item::check("gamma quotient", err < tolerance(d), format!("|sum - quotient| = {}", err.to_sci_string()))
            }
            (Err(e), _) | (_, Err(e)) => Item::fail("gamma quotient", "", Some(e.to_string())),
        };
        report.push(item);
    } else {
        report.push(Item::pass("normalization", format!("agrees with the direct terms for k = {}..=50", spec.start)));
    }
    Ok(())
}

fn pi(cli: &Cli, a: &PiArgs, report: &mut RunReport) -> Run {
    let entries = load(cli)?;
    let e = find(&entries, &a.entry)?;
    match compute_pi_via(e, a.digits) {
        Ok(v) => {
            let reference = pi_reference(bits_for_digits(a.digits) + 64);
            let err = (&v - &reference).abs();
            report.output.push(v.to_decimal_string(a.digits));
            report.worst_error = Some(err.to_sci_string());
            report.push(Item::check(
                &e.id,
                err < tolerance(a.digits),
                format!("{} digits, |value - reference| = {}", a.digits, err.to_sci_string()),
            ));
        }
        Err(err) => report.push(Item::fail(&e.id, "", Some(err.to_string()))),
    }
    Ok(())
}

fn bbp(a: &BbpArgs, report: &mut RunReport) -> Run {
    let digits = bbp_hex_digits(a.pos, a.count)?;
    report.output.push(digits.clone());
    let id = format!("pos {}", a.pos);
    if a.check {
        let reference = pi_reference((4 * (a.pos + a.count as u64) + 64) as u32);
        let expected = hex_digits_of(&reference, a.pos, a.count);
        let ok = expected == digits;
        report.push(Item::check(id, ok, format!("spigot {digits}, base conversion {expected}")));
    } else {
        report.push(Item::pass(id, digits));
    }
    Ok(())
}

fn rate(cli: &Cli, a: &RateArgs, report: &mut RunReport) -> Run {
    let entries = load(cli)?;
    let e = find(&entries, &a.id)?;
    match convergence_rate(&e.spec, a.k) {
        Ok(r) => {
            let dev = r.relative_deviation();
            let ratio = r.ratio.to_f64();
            report.output.push(format!("{ratio:.12}"));
            let detail = format!(
                "|term({})/term({})| = {ratio:.12}, limit {}, relative distance {dev:.3e}",
                a.k + 1,
                a.k,
                format_rational(&r.target)
            );
            report.push(Item::check(&e.id, a.tolerance.is_none_or(|t| dev < t), detail));
        }
        Err(err) => report.push(Item::fail(&e.id, "", Some(err.to_string()))),
    }
    Ok(())
}

/// `c1 x1 + c2 x2 - ...` with signs folded into the operators.
fn signed_sum(terms: impl Iterator<Item = (BigRational, String)>) -> String {
    let mut out = String::new();
    for (i, (c, what)) in terms.enumerate() {
        let neg = c < BigRational::zero();
        let mag = format_rational(&if neg { -c } else { c });
        match (i, neg) {
            (0, false) => out.push_str(&format!("{mag}{what}")),
            (0, true) => out.push_str(&format!("-{mag}{what}")),
            (_, false) => out.push_str(&format!(" + {mag}{what}")),
            (_, true) => out.push_str(&format!(" - {mag}{what}")),
        }
    }
    out
}
