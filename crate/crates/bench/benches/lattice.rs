use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jacstab_bench::complete;
use jacstab_core::lattice;
use std::hint::black_box;

fn complexity(c: &mut Criterion) {
    let mut group = c.benchmark_group("complexity");
    for n in [4, 5, 6] {
        let graph = complete(n).unwrap();
        group.bench_function(BenchmarkId::new("determinant", n), |b| {
            b.iter(|| lattice::complexity(black_box(&graph)))
        });
        group.bench_function(BenchmarkId::new("smith", n), |b| {
            b.iter(|| lattice::complexity_snf(black_box(&graph)))
        });
    }
    group.finish();
}

fn equivalence(c: &mut Criterion) {
    let graph = complete(5).unwrap();
    let d1 = [2, -1, 0, 3, -4];
    let d2 = [0, 0, 0, 0, 0];
    c.bench_function("multidegrees_equivalent/5", |b| {
        b.iter(|| lattice::multidegrees_equivalent(&graph, black_box(&d1), black_box(&d2)).unwrap())
    });
}

criterion_group!(benches, complexity, equivalence);
criterion_main!(benches);
