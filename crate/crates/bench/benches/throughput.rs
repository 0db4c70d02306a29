use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use strahler_core::{
    hs_tail_table, kary_tail_table, replicate_rng, rng_from_seed, sample_conditional, strahler_number,
    DistSpec, OffspringDistribution, SampleBudget, Variant,
};

fn dist(name: &str) -> OffspringDistribution {
    name.parse::<DistSpec>().and_then(|s| s.build()).expect("builtin")
}

fn sampling(c: &mut Criterion) {
    let d = dist("catalan");
    let budget = SampleBudget::default();
    let mut group = c.benchmark_group("sample_conditional");
    for n in [1_000u64, 10_000, 100_000] {
        group.throughput(Throughput::Elements(n));
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut rng = rng_from_seed(1);
            b.iter(|| sample_conditional(&d, n, &mut rng, &budget).unwrap());
        });
    }
    group.finish();
}

fn folding(c: &mut Criterion) {
    let d = dist("poisson1");
    let n = 1_000_000;
    let tree = sample_conditional(&d, n, &mut replicate_rng(3, n, 0), &SampleBudget::default()).unwrap();
    let mut group = c.benchmark_group("strahler_fold");
    group.throughput(Throughput::Elements(n));
    for v in [Variant::Hs, Variant::French, Variant::Canadian, Variant::Rigid] {
        group.bench_function(format!("{v:?}"), |b| b.iter(|| strahler_number(black_box(&tree), v)));
    }
    group.finish();
}

fn exact_tables(c: &mut Criterion) {
    let mut group = c.benchmark_group("exact_table");
    group.sample_size(10);
    let p = dist("poisson1");
    group.bench_function("hs poisson1 x40 256b", |b| b.iter(|| hs_tail_table(&p, 40, 256).unwrap()));
    let d3 = OffspringDistribution::new_finite(&[2.0 / 3.0, 0.0, 0.0, 1.0 / 3.0]).unwrap();
    group.bench_function("kary3 d3 x12 512b", |b| b.iter(|| kary_tail_table(&d3, 3, 12, 512).unwrap()));
    group.finish();
}

criterion_group!(benches, sampling, folding, exact_tables);
criterion_main!(benches);
