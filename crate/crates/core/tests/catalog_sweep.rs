use dougall_pi::catalog::{builtin_catalog, match_to_theorem, verify_entry, ConstClass, MatchMode};
use dougall_pi::engine::{verify_bbp_equivalence, BbpFamily};

#[test]
fn every_entry_certifies_at_100_digits() {
    let entries = builtin_catalog();
    let results = dougall_pi::par::map(&entries, |e| (e.id.clone(), verify_entry(e, 100)));
    let bad: Vec<_> = results
        .iter()
        .filter(|(_, r)| !matches!(r, Ok(c) if c.passed))
        .map(|(id, r)| format!("{id}: {r:?}"))
        .collect();
    assert!(bad.is_empty(), "{bad:#?}");
}

#[test]
fn every_entry_matches_its_theorem() {
    let entries = builtin_catalog();
    let results = dougall_pi::par::map(&entries, |e| (e.id.clone(), match_to_theorem(e).map(|m| m.mode)));
    let bad: Vec<_> = results.iter().filter(|(_, r)| r.is_err()).collect();
    assert!(bad.is_empty(), "{bad:#?}");
    // Leading terms that differ are settled exactly through the additive constants.
    assert!(results.iter().all(|(_, r)| matches!(r, Ok(MatchMode::Exact))));
}

#[test]
fn bbp_entries_fold_onto_the_two_families() {
    let entries = builtin_catalog();
    let bbp: Vec<_> = entries.iter().filter(|e| e.class == ConstClass::Bbp).collect();
    assert_eq!(bbp.len(), 10);
    for e in bbp {
        let r = verify_bbp_equivalence(e).unwrap_or_else(|err| panic!("{}: {err}", e.id));
        let expected = if e.attribution.as_deref().unwrap_or("").contains("Plouffe") {
            BbpFamily::Classic
        } else {
            BbpFamily::Shifted
        };
        assert_eq!(r.family, expected, "{}", e.id);
    }
}
