use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use iet_bench::{constructed, showcase};
use iet_core::orbits::{boundaries_on_connections, periodic_components_oracle, OracleCaps};
use iet_core::rauzy::finite_expansion;
use iet_core::{classify_iet, Caps};

fn classification(c: &mut Criterion) {
    let t = showcase();
    c.bench_function("classify showcase", |b| b.iter(|| classify_iet(black_box(&t), &Caps::default()).unwrap()));
    let t = constructed(10, 2, 4);
    c.bench_function("classify n=10 k=2 l=4", |b| b.iter(|| classify_iet(black_box(&t), &Caps::default()).unwrap()));
}

fn expansion(c: &mut Criterion) {
    let t = showcase();
    c.bench_function("finite expansion showcase", |b| {
        b.iter(|| finite_expansion(black_box(t.lengths()), t.perm(), 2000).unwrap())
    });
}

fn orbits(c: &mut Criterion) {
    let t = showcase();
    let report = classify_iet(&t, &Caps::default()).unwrap();
    let supports: Vec<_> = report.components.iter().map(|c| c.support.clone()).collect();
    c.bench_function("connection scan showcase", |b| {
        b.iter(|| boundaries_on_connections(black_box(&t), &supports, 4096).unwrap())
    });
    c.bench_function("oracle showcase depth 1024", |b| {
        b.iter(|| periodic_components_oracle(black_box(&t), OracleCaps { start_depth: 16, max_depth: 1024 }).unwrap())
    });
}

criterion_group!(benches, classification, expansion, orbits);
criterion_main!(benches);
