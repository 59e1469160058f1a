//! End-to-end acceptance runs against the built binary. One line per
//! criterion; the process fails if any criterion fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use dougall_pi::catalog::builtin_catalog_source;
use dougall_pi::numeric::{bits_for_digits, pi_reference};
use serde_json::Value;

struct Run {
    code: i32,
    report: Value,
    stderr: String,
}

fn run(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_dougall-pi"))
        .arg("--format")
        .arg("json")
        .args(args)
        .output()
        .expect("binary runs");
    let stdout = String::from_utf8_lossy(&out.stdout);
    Run {
        code: out.status.code().unwrap_or(-1),
        report: serde_json::from_str(&stdout).unwrap_or(Value::Null),
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn passed(r: &Run) -> u64 {
    r.report["passed"].as_u64().unwrap_or(0)
}

fn first_output(r: &Run) -> String {
    r.report["output"][0].as_str().unwrap_or("").to_string()
}

/// Checks within one criterion: every one must hold, and the whole
/// criterion must finish inside its time budget.
struct Criterion {
    failures: Vec<String>,
    notes: Vec<String>,
}

impl Criterion {
    fn expect(&mut self, ok: bool, what: impl Into<String>) {
        if !ok {
            self.failures.push(what.into());
        }
    }

    fn note(&mut self, s: impl Into<String>) {
        self.notes.push(s.into());
    }
}

fn criterion(n: u32, title: &str, budget: Duration, body: impl FnOnce(&mut Criterion)) -> bool {
    let started = Instant::now();
    let mut c = Criterion { failures: Vec::new(), notes: Vec::new() };
    body(&mut c);
    let elapsed = started.elapsed();
    c.expect(elapsed <= budget, format!("took {:.1}s, budget {}s", elapsed.as_secs_f64(), budget.as_secs()));
    let ok = c.failures.is_empty();
    let detail = if ok { c.notes.join("; ") } else { c.failures.join("; ") };
    println!(
        "criterion {n:>2} {} {title} ({:.1}s){}{}",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        if detail.is_empty() { "" } else { ": " },
        detail
    );
    ok
}

fn mutated_catalog(dir: &Path, name: &str, edit: impl FnOnce(&mut Vec<Value>)) -> String {
    let mut v: Vec<Value> = serde_json::from_str(builtin_catalog_source()).unwrap();
    edit(&mut v);
    let path = dir.join(name);
    std::fs::write(&path, Value::Array(v).to_string()).unwrap();
    path.to_string_lossy().into_owned()
}

fn entry<'a>(v: &'a mut [Value], id: &str) -> &'a mut Value {
    v.iter_mut().find(|e| e["id"] == id).expect("entry exists")
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

fn main() {
    let mut results = Vec::new();

    results.push(criterion(1, "Dougall sum, 200 random boxes, n = 0..20, exact", secs(60), |c| {
        let args = ["verify", "dougall", "--trials", "200", "--nmax", "20", "--seed", "1"];
        let r = run(&args);
        c.expect(r.code == 0, format!("exit {}", r.code));
        c.expect(passed(&r) == 200, format!("{} of 200 trials passed", passed(&r)));
        c.note(format!("{} trials", passed(&r)));
    }));

    results.push(criterion(2, "inversion round trips, 50 schemes, n <= 12, both pairs", secs(30), |c| {
        let r = run(&["verify", "inversion", "--pairs", "plain,extended", "--trials", "50", "--nmax", "12", "--seed", "1"]);
        c.expect(r.code == 0, format!("exit {}", r.code));
        c.expect(passed(&r) == 2, "both pairs must pass");
        c.note(format!(
            "plain: {}; extended: {}",
            r.report["items"][0]["detail"].as_str().unwrap_or(""),
            r.report["items"][1]["detail"].as_str().unwrap_or("")
        ));
    }));

    results.push(criterion(3, "parity form and dual relation, 50 boxes, n <= 12", secs(60), |c| {
        let r = run(&["verify", "chain", "--trials", "50", "--nmax", "12", "--seed", "1"]);
        c.expect(r.code == 0, format!("exit {}", r.code));
        c.expect(passed(&r) == 50, format!("{} of 50 trials passed", passed(&r)));
    }));

    results.push(criterion(4, "Gamma quotients vs 120-term sums to 1e-50, 10 boxes", secs(60), |c| {
        let r = run(&["verify", "lemma", "--trials", "10", "--terms", "120", "--digits", "50", "--seed", "1"]);
        c.expect(r.code == 0, format!("exit {}", r.code));
        c.expect(passed(&r) == 30, format!("{} of 30 comparisons passed", passed(&r)));
    }));

    results.push(criterion(5, "catalog certification at 100 digits and theorem match", secs(120), |c| {
        let total = serde_json::from_str::<Vec<Value>>(builtin_catalog_source()).unwrap().len() as u64;
        let r = run(&["verify", "catalog", "--digits", "100"]);
        c.expect(r.code == 0, format!("exit {}", r.code));
        c.expect(passed(&r) == total, format!("{} of {total} entries passed", passed(&r)));
        c.note(format!("{total} entries, worst error {}", r.report["worst_error"].as_str().unwrap_or("?")));
    }));

    results.push(criterion(6, "1000 digits of pi from the first entry", secs(10), |c| {
        let r = run(&["pi", "--entry", "s3.1-ex1", "--digits", "1000"]);
        c.expect(r.code == 0, format!("exit {}", r.code));
        let reference = pi_reference(bits_for_digits(1000) + 64).to_decimal_string(1000);
        c.expect(first_output(&r) == reference, "digits differ from the arctangent reference");
    }));

    results.push(criterion(7, "hex digits at 0 and 1e5; ten base-16 formula equivalences", secs(30), |c| {
        let r0 = run(&["bbp", "--pos", "0", "--count", "16", "--check"]);
        c.expect(
            r0.code == 0 && first_output(&r0) == "243F6A8885A308D3",
            format!("position 0 gave {}", first_output(&r0)),
        );
        let r5 = run(&["bbp", "--pos", "100000", "--count", "8", "--check"]);
        c.expect(r5.code == 0, format!("position 1e5: {}", r5.report["items"][0]["detail"]));
        let eq = run(&["verify", "bbp"]);
        c.expect(eq.code == 0 && passed(&eq) == 10, format!("{} of 10 equivalences", passed(&eq)));
        let classic = eq.report["items"]
            .as_array()
            .map(|v| v.iter().filter(|i| i["detail"].as_str().unwrap_or("").starts_with("Classic")).count())
            .unwrap_or(0);
        c.expect(classic == 5, format!("{classic} entries in the first family, expected 5"));
        c.note(format!("hex at 1e5 = {}", first_output(&r5)));
    }));

    results.push(criterion(8, "term ratio within 2% of 1/16 at k = 500", secs(5), |c| {
        let table: Vec<Value> = serde_json::from_str(builtin_catalog_source()).unwrap();
        let mut tags = std::collections::BTreeSet::new();
        for id in ["s3.1-ex1", "s3.2-ex1", "s3.4-ex1", "s3.6-ex1", "s3.7-ex3"] {
            let e = table.iter().find(|e| e["id"] == id).unwrap();
            tags.insert(e["theorem"].as_str().unwrap().to_string());
            let r = run(&["rate", "--id", id, "--k", "500", "--tolerance", "0.02"]);
            c.expect(r.code == 0, format!("{id}: {}", r.report["items"][0]["detail"]));
        }
        c.expect(tags.len() == 2, "entries must cover both theorems");
    }));

    results.push(criterion(9, "Gamma(x+n) / (n^x (n-1)!) -> 1 at n = 100, 1000", secs(5), |c| {
        let r = run(&["verify", "limit", "--x", "1/3,1/2,5/6", "--n", "100,1000"]);
        c.expect(r.code == 0, format!("exit {}", r.code));
        c.expect(passed(&r) == 6, format!("{} of 6 points", passed(&r)));
    }));

    results.push(criterion(10, "negative controls exit with code 2", secs(60), |c| {
        let dir = tempfile::tempdir().unwrap();
        let poly = mutated_catalog(dir.path(), "poly.json", |v| entry(v, "s3.1-ex1")["poly"][0] = Value::from("4"));
        let tag = mutated_catalog(dir.path(), "tag.json", |v| entry(v, "s3.1-ex1")["theorem"] = Value::from("B"));
        let bbp = mutated_catalog(dir.path(), "bbp.json", |v| entry(v, "s3.7-ex1")["poly"][0] = Value::from("48"));
        let cases: [(&str, Vec<&str>); 5] = [
            ("mutated polynomial", vec!["verify", "catalog", "--id", "s3.1-ex1", "--catalog", &poly]),
            ("wrong theorem tag", vec!["verify", "catalog", "--id", "s3.1-ex1", "--catalog", &tag]),
            ("corrupted BBP coefficient", vec!["verify", "bbp", "--id", "s3.7-ex1", "--catalog", &bbp]),
            ("sign fault in Dougall check", vec!["verify", "dougall", "--trials", "5", "--inject", "sign-flip"]),
            ("ill-posed inversion scheme", vec!["verify", "inversion", "--trials", "5", "--inject", "zero-scheme"]),
        ];
        for (name, args) in cases {
            let r = run(&args);
            c.expect(r.code == 2, format!("{name}: exit {} {}", r.code, r.stderr.trim()));
        }
        let unknown = run(&["verify", "catalog", "--id", "no-such-entry"]);
        c.expect(unknown.code == 1, format!("unknown id: exit {}", unknown.code));
    }));

    let failed = results.iter().filter(|ok| !**ok).count();
    println!("acceptance: {} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
