use std::hint::black_box;

use avlab_core::data::builtin_scenarios;
use avlab_core::election::optimal_ballot;
use avlab_core::fitting::{fit_model, ModelKind};
use avlab_core::synth::{generate_synthetic_cohort, CohortSpec, ParamRanges};
use avlab_core::tables::au_prediction_map;
use avlab_core::evaluate_cohort;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    vec![
        ("1-thread", rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap()),
        ("all-threads", rayon::ThreadPoolBuilder::new().build().unwrap()),
    ]
}

fn bench(c: &mut Criterion) {
    let scenarios = builtin_scenarios();
    let mut spec = CohortSpec::new(20, ModelKind::Aut, 3);
    spec.ranges = ParamRanges::recoverable_aut();
    spec.noise = 0.2;
    let cohort = generate_synthetic_cohort(&spec, &scenarios).unwrap();
    let hard = scenarios["B"].with_condition(3, 3).unwrap();

    let mut g = c.benchmark_group("grid");
    g.sample_size(10);
    for (name, pool) in pools() {
        g.bench_with_input(BenchmarkId::new("aut_fit", name), &cohort, |b, recs| {
            b.iter(|| pool.install(|| fit_model(ModelKind::Aut, black_box(recs), &scenarios).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("evaluate_cohort", name), &cohort, |b, recs| {
            b.iter(|| pool.install(|| evaluate_cohort(black_box(recs), &scenarios).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("optimal_ballot_n3", name), &hard, |b, s| {
            b.iter(|| pool.install(|| optimal_ballot(black_box(s))))
        });
        g.bench_with_input(BenchmarkId::new("au_prediction_map", name), &scenarios["A"], |b, s| {
            b.iter(|| pool.install(|| au_prediction_map(black_box(s), 1e-6).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
