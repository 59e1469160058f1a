//! Single worker against the full pool on the three parallel workloads:
//! binary splitting of one long series, per-entry catalog certification,
//! and Machin pi for base conversion.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dougall_pi::catalog::{builtin_catalog, find, verify_entry};
use dougall_pi::engine::sum_series;
use dougall_pi::numeric::pi_reference;
use dougall_pi::par::{map, with_jobs};

const MODES: [(&str, Option<usize>); 2] = [("sequential", Some(1)), ("pooled", None)];

fn binary_splitting(c: &mut Criterion) {
    let entries = builtin_catalog();
    let spec = find(&entries, "s3.1-ex1").unwrap().spec.clone();
    let mut g = c.benchmark_group("sum_series_5000_digits");
    g.sample_size(10);
    for (name, jobs) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| with_jobs(jobs, || sum_series(&spec, 5000).unwrap()))
        });
    }
    g.finish();
}

fn catalog(c: &mut Criterion) {
    let entries = builtin_catalog();
    let mut g = c.benchmark_group("verify_catalog_50_digits");
    g.sample_size(10);
    for (name, jobs) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| with_jobs(jobs, || map(&entries, |e| verify_entry(e, 50).unwrap().passed)))
        });
    }
    g.finish();
}

fn machin(c: &mut Criterion) {
    let mut g = c.benchmark_group("pi_reference_100k_bits");
    g.sample_size(10);
    for (name, jobs) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| with_jobs(jobs, || pi_reference(100_000)))
        });
    }
    g.finish();
}

criterion_group!(benches, binary_splitting, catalog, machin);
criterion_main!(benches);
