//! Sequential versus data-parallel evaluation of the heavy experiments.
//!
//! Each benchmark runs once inside a single-thread rayon pool and once on the
//! default pool. Building with `--no-default-features` compiles the core
//! without rayon, in which case both variants run the sequential path:
//!
//! ```text
//! cargo bench -p fockdyn-core --bench scans
//! cargo bench -p fockdyn-core --bench scans --no-default-features
//! ```

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use fockdyn_core::dynlab::{ritt_functional_scan, unconditional_ritt_estimate, ScanGrid};
use fockdyn_core::symbol::OperatorParams;
use fockdyn_core::Complex64;

fn params() -> OperatorParams {
    OperatorParams::hilbert(
        Complex64::new(0.5, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.0, 0.0),
        Complex64::new(0.9, 0.0),
    )
    .unwrap()
}

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let default = rayon::ThreadPoolBuilder::new().build().unwrap();
    vec![("sequential", single), ("parallel", default)]
}

fn ritt_scan(c: &mut Criterion) {
    let p = params();
    let grid = ScanGrid::default_ritt();
    let mut group = c.benchmark_group("ritt_scan");
    group.sample_size(10);
    for n_dim in [32, 64] {
        for (label, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(label, n_dim), &n_dim, |b, &n| {
                b.iter(|| pool.install(|| ritt_functional_scan(black_box(&p), n, &grid).unwrap()))
            });
        }
    }
    group.finish();
}

fn unconditional(c: &mut Criterion) {
    let p = params();
    let mut group = c.benchmark_group("unconditional_estimate");
    group.sample_size(10);
    for (label, pool) in pools() {
        group.bench_function(label, |b| {
            b.iter(|| pool.install(|| unconditional_ritt_estimate(black_box(&p), 48, 20, 8, 7).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, ritt_scan, unconditional);
criterion_main!(benches);
