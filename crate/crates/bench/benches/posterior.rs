use std::hint::black_box;

use bayesmia::{
    builtin_network, make_half_repeated, make_product, posterior_ratio, BayesianNetwork,
    PosteriorEngine,
};
use bayesmia_bench::release;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn networks() -> Vec<(String, BayesianNetwork)> {
    let mut nets = Vec::new();
    for d in [10, 20] {
        nets.push((format!("product-{d}"), make_product(&vec![0.5; d]).unwrap()));
    }
    nets.push((
        "half-10".to_string(),
        make_half_repeated(10, &[0.5; 6]).unwrap(),
    ));
    for name in ["cancer", "earthquake", "asia", "survey", "sachs-path-left"] {
        nets.push((name.to_string(), builtin_network(name).unwrap()));
    }
    nets
}

fn posterior(c: &mut Criterion) {
    let mut group = c.benchmark_group("posterior_ratio");
    group.sample_size(20);
    for (name, bn) in networks() {
        let (counts, y) = release(&bn, 4, 7).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(&name), &bn, |b, bn| {
            b.iter(|| posterior_ratio(black_box(bn), &counts, &y).unwrap())
        });
    }
    group.finish();
}

fn engine_lookup(c: &mut Criterion) {
    let bn = builtin_network("asia").unwrap();
    let law = bn.output_marginal_law().unwrap();
    let (counts, y) = release(&bn, 4, 7).unwrap();
    c.bench_function("engine/asia-build", |b| {
        b.iter(|| PosteriorEngine::new(black_box(&law), &counts).unwrap())
    });
    let engine = PosteriorEngine::new(&law, &counts).unwrap();
    c.bench_function("engine/asia-ratio", |b| {
        b.iter(|| engine.ratio(black_box(&y)).unwrap())
    });
}

criterion_group!(benches, posterior, engine_lookup);
criterion_main!(benches);
