use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use persistence_bench::{exact_cases, halfplane_case, sampled_cases};
use persistence_core::estimators::mc_persistence;
use persistence_core::exact::exact_persistence;
use persistence_core::fluctuation::{halfplane_measures, positivity_probs, sparre_andersen, PositivityMode};

fn exact(c: &mut Criterion) {
    let mut g = c.benchmark_group("exact_persistence");
    for (name, spec, n) in exact_cases() {
        g.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| b.iter(|| exact_persistence(&spec, n).unwrap()));
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let mut g = c.benchmark_group("mc_persistence");
    g.sample_size(10);
    for (name, spec) in sampled_cases() {
        g.bench_function(BenchmarkId::new(name, 256), |b| {
            b.iter(|| mc_persistence(&spec, 256, 10_000, black_box(1), 1))
        });
    }
    g.finish();
}

fn fluctuation(c: &mut Criterion) {
    let (bspec, n) = halfplane_case();
    c.bench_function("halfplane_measures/five-atom", |b| b.iter(|| halfplane_measures(&bspec, n).unwrap()));
    let (_, spec, _) = exact_cases().remove(0);
    c.bench_function("sparre_andersen/simple/64", |b| {
        b.iter(|| {
            let probs = positivity_probs(&spec, 64, PositivityMode::Strict).unwrap();
            sparre_andersen(&probs)
        })
    });
}

criterion_group!(benches, exact, monte_carlo, fluctuation);
criterion_main!(benches);
