use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hotelling::oracle::{grid_best_response, grid_eliminate, Grid};
use hotelling::{Exec, ModelParams};

const BACKENDS: [(&str, Exec); 2] = [
    ("sequential", Exec::Sequential),
    ("parallel", Exec::Parallel),
];

fn best_response(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid_best_response");
    let three = ModelParams::symmetric(3, 1.0).unwrap();
    for (name, exec) in BACKENDS {
        let grid = Grid::standard(10_000).unwrap().with_exec(exec);
        group.bench_function(BenchmarkId::new("three_firms_m10000", name), |b| {
            b.iter(|| grid_best_response(0, black_box(&[0.2, 0.9]), &three, &grid, None).unwrap())
        });
    }
    group.finish();
}

fn eliminate(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid_eliminate");
    group.sample_size(10);
    let two = ModelParams::two(1.0, 3.0).unwrap();
    let three = ModelParams::symmetric(3, 1.0).unwrap();
    for (name, exec) in BACKENDS {
        let grid = Grid::standard(400).unwrap().with_exec(exec);
        group.bench_function(BenchmarkId::new("two_firms_m400", name), |b| {
            b.iter(|| grid_eliminate(black_box(&two), &grid, 1_000, false).unwrap())
        });
        let grid = Grid::standard(100).unwrap().with_exec(exec);
        group.bench_function(BenchmarkId::new("three_firms_m100", name), |b| {
            b.iter(|| grid_eliminate(black_box(&three), &grid, 1_000, false).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, best_response, eliminate);
criterion_main!(benches);
