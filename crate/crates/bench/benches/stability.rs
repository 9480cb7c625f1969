use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jacstab_bench::{complete, general_profile, necklace};
use jacstab_core::stability::{check_all_subsets, StabilityContext};
use jacstab_core::{Mode, SheafType};
use std::hint::black_box;

fn check(c: &mut Criterion) {
    let mut group = c.benchmark_group("check");
    for n in [3, 4, 5] {
        let graph = necklace(n).unwrap();
        let profile = general_profile(&graph, 0, 1).unwrap();
        let ctx = StabilityContext::new(&graph, &profile).unwrap();
        let sheaf = SheafType::line_bundle(vec![0; n]);
        group.bench_with_input(BenchmarkId::new("connected", n), &sheaf, |b, s| {
            b.iter(|| ctx.check(black_box(s), Some(0)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("all_subsets", n), &sheaf, |b, s| {
            b.iter(|| check_all_subsets(&graph, &profile, black_box(s), Some(0)).unwrap())
        });
    }
    group.finish();
}

fn enumerate(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate");
    for n in [4, 5, 6] {
        let graph = complete(n).unwrap();
        let profile = general_profile(&graph, 1, 2).unwrap();
        let ctx = StabilityContext::new(&graph, &profile).unwrap();
        group.bench_function(BenchmarkId::new("quasistable", n), |b| {
            b.iter(|| ctx.enumerate(Mode::Quasistable, Some(0), false).unwrap().len())
        });
        group.bench_function(BenchmarkId::new("semistable_nonfree", n), |b| {
            b.iter(|| ctx.enumerate(Mode::Semistable, None, true).unwrap().len())
        });
    }
    group.finish();
}

criterion_group!(benches, check, enumerate);
criterion_main!(benches);
