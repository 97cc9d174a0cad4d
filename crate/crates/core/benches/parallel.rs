use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dimlab_core::estimate::{log_schedule, neighbour_counts, pair_counts, PointCloud};
use dimlab_core::{Execution, SymbolicMeasure};

fn cloud(n: usize) -> PointCloud {
    SymbolicMeasure::lebesgue(0.0, 1.0).unwrap().sample(n, 42).unwrap().into()
}

fn pairs(c: &mut Criterion) {
    let rs = log_schedule(1e-1, 1e-5, 24).unwrap();
    let mut group = c.benchmark_group("pair_counts");
    for n in [10_000usize, 100_000] {
        let pc = cloud(n);
        for exec in [Execution::Serial, Execution::Parallel] {
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), n), &pc, |b, pc| {
                b.iter(|| pair_counts(pc, &rs, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn neighbours(c: &mut Criterion) {
    let rs = log_schedule(1e-1, 1e-5, 24).unwrap();
    let pc = cloud(10_000);
    let mut group = c.benchmark_group("neighbour_counts");
    for exec in [Execution::Serial, Execution::Parallel] {
        group.bench_function(format!("{exec:?}"), |b| b.iter(|| neighbour_counts(&pc, &rs, exec).unwrap()));
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = pairs, neighbours
}
criterion_main!(benches);
