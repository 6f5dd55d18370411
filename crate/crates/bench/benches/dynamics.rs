use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use dotspin::optimizer::{scan_optimum, ScanGrid};
use dotspin::oracle::{BathState, FullSystem, OracleMode};
use dotspin::{BathDistribution, CommonBathSystem, NamedState, SeparateBathSystem};

fn evolution(c: &mut Criterion) {
    let bath = BathDistribution::unpolarized_exact(100).unwrap();
    let s0 = NamedState::SingletTripletMix { r: 0.5 }.state().unwrap();

    let common = CommonBathSystem::new(1.2, 0.8, 10.0, bath.clone()).unwrap();
    c.bench_function("common_asymmetric_n100", |b| b.iter(|| common.evolve_asymmetric(black_box(&s0), 0.7)));

    let symmetric = CommonBathSystem::new(1.0, 1.0, 10.0, bath.clone()).unwrap();
    c.bench_function("common_symmetric_n100", |b| b.iter(|| symmetric.evolve_symmetric(black_box(&s0), 0.7)));

    let separate = SeparateBathSystem::symmetric(1.0, bath).unwrap();
    c.bench_function("separate_n100", |b| b.iter(|| separate.evolve(black_box(&s0), 0.7)));
}

fn oracle(c: &mut Criterion) {
    let s0 = NamedState::Singlet.state().unwrap();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("build_n8", |b| {
        b.iter(|| FullSystem::new(OracleMode::Common { k_a: 1.0, k_b: 0.6, j: 2.0 }, black_box(8)).unwrap())
    });
    let sys = FullSystem::new(OracleMode::Common { k_a: 1.0, k_b: 0.6, j: 2.0 }, 8).unwrap();
    group.bench_function("evolve_n8", |b| {
        b.iter(|| sys.evolve_reduced(black_box(&s0), BathState::FullyMixed, 1.3).unwrap())
    });
    group.finish();
}

fn optimizer(c: &mut Criterion) {
    let grid = ScanGrid::default();
    c.bench_function("scan_optimum", |b| b.iter(|| scan_optimum(black_box(0.4), &grid)));
}

criterion_group!(benches, evolution, oracle, optimizer);
criterion_main!(benches);
