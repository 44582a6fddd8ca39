use criterion::{black_box, criterion_group, criterion_main, Criterion};
use dynacon_bench::scenario;
use dynacon_core::planning::{dwa_step, extract_path, plan_potential, VelocityCommand};

fn potential(c: &mut Criterion) {
    let spec = scenario("corridor3_t7");
    let grid = spec.world.grid();
    let goal = grid.cell_of(spec.world.plate(211).expect("plate 211").point());
    c.bench_function("plan_potential corridor3", |b| {
        b.iter(|| plan_potential(black_box(grid), goal).unwrap())
    });
}

fn local(c: &mut Criterion) {
    let spec = scenario("corridor3_t7");
    let grid = spec.world.grid();
    let goal = grid.cell_of(spec.world.plate(211).expect("plate 211").point());
    let field = plan_potential(grid, goal).unwrap();
    let path = extract_path(&field, grid.cell_of(spec.start.point())).unwrap();
    let planner = &spec.planner;
    c.bench_function("dwa_step corridor3 start", |b| {
        b.iter(|| {
            dwa_step(
                black_box(spec.start),
                VelocityCommand::default(),
                &path,
                grid,
                &planner.dwa,
                planner.carrot_lookahead,
            )
        })
    });
}

criterion_group!(benches, potential, local);
criterion_main!(benches);
