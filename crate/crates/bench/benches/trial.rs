use criterion::{black_box, criterion_group, criterion_main, Criterion};
use dynacon_bench::scenario;
use dynacon_core::harness::run_trial;
use dynacon_core::perception::sense;
use dynacon_core::reasoning::BackendConfig;

fn sensing(c: &mut Criterion) {
    let spec = scenario("house1_kitchen");
    c.bench_function("sense house1 start", |b| {
        b.iter(|| sense(&spec.world, black_box(spec.start), &spec.sensor, 0).unwrap())
    });
}

fn trials(c: &mut Criterion) {
    let backend = BackendConfig::oracle();
    let mut group = c.benchmark_group("run_trial");
    group.sample_size(10);
    for id in ["corridor1_t1", "house1_kitchen"] {
        let spec = scenario(id);
        group.bench_function(id, |b| b.iter(|| run_trial(&spec, &backend, 0).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, sensing, trials);
criterion_main!(benches);
