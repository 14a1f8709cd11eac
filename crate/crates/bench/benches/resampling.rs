use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use eiv_bench::synthetic;
use eiv_core::estimators::{bootstrap_ci, slope_estimates, EstimatorKind};
use eiv_core::SufficientStats;

fn bench_estimates(c: &mut Criterion) {
    let data = synthetic(40);
    let stats = SufficientStats::from_data(&data).unwrap();
    c.bench_function("slope_estimates", |b| {
        b.iter(|| slope_estimates(black_box(&stats)).unwrap())
    });
}

fn bench_bootstrap(c: &mut Criterion) {
    let data = synthetic(40);
    let mut group = c.benchmark_group("bootstrap_ci");
    group.sample_size(20);
    for kind in [
        EstimatorKind::GeometricMean,
        EstimatorKind::OlsBisector,
        EstimatorKind::Orthogonal,
    ] {
        group.bench_function(kind.name(), |b| {
            b.iter(|| bootstrap_ci(black_box(&data), kind, 0.9, 999, 7).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_estimates, bench_bootstrap);
criterion_main!(benches);
