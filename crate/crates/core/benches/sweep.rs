use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;
use typestate_learn::sweep::{run_sweep, run_sweep_sequential, sweep_cases, SweepOracle};

fn sweep(c: &mut Criterion) {
    let cases = sweep_cases(32, 7);
    let mut g = c.benchmark_group("sweep");
    g.sample_size(10);
    g.bench_function("sequential", |b| {
        b.iter(|| black_box(run_sweep_sequential(&cases, SweepOracle::DistExact)))
    });
    g.bench_function("run_sweep", |b| {
        b.iter(|| black_box(run_sweep(&cases, SweepOracle::DistExact)))
    });
    g.finish();
}

criterion_group!(benches, sweep);
criterion_main!(benches);
