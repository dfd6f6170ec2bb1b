use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use cpcause::causation::{self, DefinitionKind};
use cpcause::{checks, engine};
use cpcause_bench::scenarios;

fn distributions(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_distribution");
    for s in scenarios() {
        group.bench_function(s.name, |b| b.iter(|| engine::exact_distribution(black_box(&s.theory))));
    }
    group.finish();
}

fn definitions(c: &mut Criterion) {
    let mut group = c.benchmark_group("cause");
    group.sample_size(20);
    for s in scenarios() {
        for kind in DefinitionKind::ALL {
            let id = format!("{}/{}", s.name, kind.name());
            group.bench_function(id, |b| {
                b.iter(|| causation::cause(kind, &s.theory, &s.story, &s.cause, &s.effect))
            });
        }
    }
    group.finish();
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("order_invariance/50", |b| {
        b.iter(|| checks::order_invariance(black_box(1), 50))
    });
    group.bench_function("lemma2/10", |b| b.iter(|| checks::lemma2(black_box(1), 10)));
    group.finish();
}

criterion_group!(benches, distributions, definitions, sweeps);
criterion_main!(benches);
