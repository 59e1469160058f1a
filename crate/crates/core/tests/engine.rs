use dougall_pi::catalog::{builtin_catalog, find, CatalogEntry, ConstClass};
use dougall_pi::engine::{
    bbp_hex_digits, compute_pi_via, convergence_rate, hex_digits_of, sum_series, verify_bbp_equivalence,
};
use dougall_pi::numeric::{bits_for_digits, pi_reference, BigFloat};
use dougall_pi::rng::SplitMix64;
use dougall_pi::Error;

fn below_pow10(x: &BigFloat, digits: u32) -> bool {
    x.log2_abs() < -(digits as f64) * std::f64::consts::LOG2_10
}

#[test]
fn error_bound_is_honest() {
    let entries = builtin_catalog();
    let rows = dougall_pi::par::map(&entries, |e| {
        let s50 = sum_series(&e.spec, 50).unwrap();
        let s150 = sum_series(&e.spec, 150).unwrap();
        let err = (&s50.value - &s150.value).abs();
        (e.id.clone(), err <= s50.error_bound, below_pow10(&s50.error_bound, 50))
    });
    for (id, honest, tight) in rows {
        assert!(honest, "{id}: bound below the true error");
        assert!(tight, "{id}: bound weaker than the target");
    }
}

#[test]
fn spigot_agrees_with_base_conversion() {
    let pi = pi_reference(4 * 10_100);
    let mut rng = SplitMix64::new(20);
    for _ in 0..20 {
        let pos = rng.range_i64(0, 10_000) as u64;
        assert_eq!(bbp_hex_digits(pos, 8).unwrap(), hex_digits_of(&pi, pos, 8), "position {pos}");
    }
}

#[test]
fn spigot_windows_overlap() {
    for pos in [0u64, 9, 1234] {
        let a = bbp_hex_digits(pos, 8).unwrap();
        let b = bbp_hex_digits(pos + 4, 8).unwrap();
        assert_eq!(a[4..], b[..4]);
    }
}

fn one_per_class(entries: &[CatalogEntry]) -> Vec<&CatalogEntry> {
    let mut out: Vec<&CatalogEntry> = Vec::new();
    for class in [ConstClass::PiInverseSquared, ConstClass::PiSquared, ConstClass::PiInverse, ConstClass::Pi, ConstClass::Bbp] {
        out.extend(entries.iter().filter(|e| e.class == class).take(2));
    }
    out
}

#[test]
fn pi_from_different_classes_agrees() {
    let entries = builtin_catalog();
    let chosen = one_per_class(&entries);
    assert_eq!(chosen.len(), 10);
    let d = 200;
    let values = dougall_pi::par::map(&chosen, |e| compute_pi_via(e, d).unwrap());
    let reference = pi_reference(bits_for_digits(d) + 64);
    for (e, v) in chosen.iter().zip(&values) {
        assert!(below_pow10(&(v - &reference).abs(), d), "{}", e.id);
        assert!(below_pow10(&(v - &values[0]).abs(), d - 2), "{}", e.id);
    }
}

#[test]
fn fifteen_pi_entry() {
    let entries = builtin_catalog();
    let e = find(&entries, "s3.7-ex1").unwrap();
    let v = compute_pi_via(e, 200).unwrap();
    assert!(below_pow10(&(&v - &pi_reference(800)).abs(), 200));
}

#[test]
fn gamma_entries_are_unsupported_for_pi() {
    let entries = builtin_catalog();
    let e = entries.iter().find(|e| e.class == ConstClass::GammaCubedOverPiSquared).unwrap();
    assert!(matches!(compute_pi_via(e, 50), Err(Error::UnsupportedLhs(_))));
}

#[test]
fn ratio_trend_approaches_one_sixteenth() {
    let entries = builtin_catalog();
    for id in ["s3.1-ex1", "s3.2-ex1", "s3.3-ex1", "s3.5-ex1", "s3.7-ex3"] {
        let e = find(&entries, id).unwrap();
        let devs: Vec<f64> = [10, 100, 1000]
            .iter()
            .map(|&k| convergence_rate(&e.spec, k).unwrap().relative_deviation())
            .collect();
        assert!(devs[0] > devs[1] && devs[1] > devs[2], "{id}: {devs:?}");
    }
}

#[test]
fn bbp_corruption_is_caught() {
    let entries = builtin_catalog();
    let mut e = find(&entries, "s3.7-ex1").unwrap().clone();
    e.spec.poly[1] += dougall_pi::rational::int(1);
    assert!(matches!(verify_bbp_equivalence(&e), Err(Error::NoMatch(_))));
    let mut e = find(&entries, "s3.7-ex6").unwrap().clone();
    e.spec.additive += dougall_pi::rational::int(1);
    assert!(matches!(verify_bbp_equivalence(&e), Err(Error::NoMatch(_))));
}
