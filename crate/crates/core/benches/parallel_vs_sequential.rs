//! Default execution against the sequential fallback on the hot loops.
//! Build with `--no-default-features` to compile out rayon entirely.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use schreier::builders::{random_perm_model, trivial_core};
use schreier::cycles::count_cycles;
use schreier::exec;
use schreier::local::bs_statistics;
use schreier::spectral::{rho0_iterative, LanczosOptions, MarkovOperator, SymmetricOperator};
use schreier::walks::{count_returns, count_returns_core};
use schreier::GenSet;

fn modes() -> [(&'static str, bool); 2] {
    [("default", false), ("sequential", true)]
}

fn run<R>(sequential: bool, f: impl FnOnce() -> R) -> R {
    if sequential {
        exec::sequential(f)
    } else {
        f()
    }
}

fn bench(c: &mut Criterion) {
    let g = random_perm_model(2, 20_000, 1);
    let core = trivial_core(&GenSet::free(2));
    let op = MarkovOperator::new(&g);
    let x: Vec<f64> = (0..g.vertex_count()).map(|i| (i as f64).sin()).collect();

    let mut group = c.benchmark_group("markov_matvec");
    for (name, seq) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            let mut y = vec![0.0; x.len()];
            b.iter(|| run(seq, || op.apply(black_box(&x), &mut y)))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("lanczos_rho0");
    group.sample_size(10);
    for (name, seq) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(seq, || rho0_iterative(black_box(&g), &LanczosOptions::default()).unwrap()))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("return_dp");
    group.sample_size(10);
    for (name, seq) in modes() {
        group.bench_function(BenchmarkId::new("graph", name), |b| {
            b.iter(|| run(seq, || count_returns(black_box(&g), 0, 40, 40).unwrap()))
        });
        group.bench_function(BenchmarkId::new("tree_cover", name), |b| {
            b.iter(|| run(seq, || count_returns_core(black_box(&core), 400, 256)))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("ball_statistics");
    group.sample_size(10);
    for (name, seq) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(seq, || bs_statistics(black_box(&g), 2).unwrap()))
        });
    }
    group.finish();

    let mut group = c.benchmark_group("cycle_count_l5");
    group.sample_size(10);
    for (name, seq) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| run(seq, || count_cycles(black_box(&g), 5).unwrap()))
        });
    }
    group.finish();
}

criterion_group!(benches, bench);
criterion_main!(benches);
