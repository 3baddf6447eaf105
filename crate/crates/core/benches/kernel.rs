use criterion::{criterion_group, criterion_main, Criterion, Throughput};

use regnet::ensembles::{
    sample_erdos_renyi, sample_initial, sample_signs, sample_thresholds, EnsembleSeed,
};
use regnet::{ActivityVector64, RegulatoryNetwork64};

/// Step throughput in arrow updates per second for the n=100, |A|~2000
/// workload the sweep experiments run on.
fn bench_step(c: &mut Criterion) {
    let seed = EnsembleSeed::new(17);
    let mut rng = seed.graph_stream(0);
    let graph = sample_erdos_renyi(100, 0.2, false, &mut rng).unwrap();
    let arrows = graph.arrow_count() as u64;
    let signs = sample_signs(graph.arrows(), 0.5, &mut rng).unwrap();
    let thresholds = sample_thresholds(graph.arrows(), &mut rng);
    let net = RegulatoryNetwork64::new(graph, signs, thresholds, 0.3).unwrap();
    let x0: ActivityVector64 = sample_initial(100, &mut seed.orbit_stream(0, 0));

    let mut group = c.benchmark_group("kernel");
    group.throughput(Throughput::Elements(arrows));
    group.bench_function("step_n100", |b| {
        let mut x = x0.clone();
        b.iter(|| {
            x = net.step(&x).unwrap();
        });
    });
    group.finish();
}

criterion_group!(benches, bench_step);
criterion_main!(benches);
