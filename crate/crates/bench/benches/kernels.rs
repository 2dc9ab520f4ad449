use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;
use symloop_bench::{eight_group, test_loop};
use symloop_core::lagrangian::{MassVector, PotentialSpec};
use symloop_core::loopspace::{action_gradient, discrete_action, symmetrize_nodes};
use symloop_core::verify::newton_residual;

fn bench_action(c: &mut Criterion) {
    let masses = MassVector::equal(3);
    let spec = PotentialSpec::newtonian();
    let mut group = c.benchmark_group("discrete_action");
    for n in [60usize, 240, 960] {
        let lp = test_loop(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &lp, |b, lp| {
            b.iter(|| discrete_action(black_box(lp), &masses, &spec).unwrap())
        });
    }
    group.finish();
}

fn bench_gradient(c: &mut Criterion) {
    let masses = MassVector::equal(3);
    let spec = PotentialSpec::newtonian();
    let mut group = c.benchmark_group("action_gradient");
    for n in [60usize, 240, 960] {
        let lp = test_loop(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &lp, |b, lp| {
            b.iter(|| action_gradient(black_box(lp), &masses, &spec).unwrap())
        });
    }
    group.finish();
}

fn bench_symmetrize(c: &mut Criterion) {
    let group = eight_group();
    let mut bg = c.benchmark_group("symmetrize");
    for n in [60usize, 240, 960] {
        let lp = test_loop(n);
        bg.bench_with_input(BenchmarkId::from_parameter(n), &lp, |b, lp| {
            b.iter(|| symmetrize_nodes(black_box(lp), &group).unwrap())
        });
    }
    bg.finish();
}

fn bench_residual(c: &mut Criterion) {
    let masses = MassVector::equal(3);
    let spec = PotentialSpec::newtonian();
    let lp = test_loop(240);
    c.bench_function("newton_residual/240", |b| {
        b.iter(|| newton_residual(black_box(&lp), &masses, &spec).unwrap())
    });
}

criterion_group!(benches, bench_action, bench_gradient, bench_symmetrize, bench_residual);
criterion_main!(benches);
