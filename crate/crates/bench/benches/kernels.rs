use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kicked_top::classical::SeedChoice;
use kicked_top::spin::CoherentBasis;
use kicked_top::{
    build_floquet, chaotic_mask, husimi_sweep, kicked_top_spectrum, AnalyticForm, ChaoticMask, Observable,
    OtocEngine, PhaseGrid, Spin,
};
use kicked_top_bench::{spectrum, ALPHA, KAPPA};

fn coherent_states(c: &mut Criterion) {
    let mut g = c.benchmark_group("coherent_block");
    for s in [50.0, 150.0] {
        let spin = Spin::new(s).unwrap();
        let basis = CoherentBasis::new(spin);
        let grid = PhaseGrid::new(300).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(s), &s, |b, _| {
            b.iter(|| black_box(grid.coherent_block(&basis, 0..2048)))
        });
    }
    g.finish();
}

fn floquet(c: &mut Criterion) {
    let mut g = c.benchmark_group("floquet");
    g.sample_size(10);
    let spin = Spin::new(150.0).unwrap();
    g.bench_function("build_S150", |b| b.iter(|| black_box(build_floquet(spin, ALPHA, KAPPA).unwrap())));
    g.bench_function("spectrum_S150", |b| {
        b.iter(|| black_box(kicked_top_spectrum(spin, ALPHA, KAPPA, Observable::Sx).unwrap()))
    });
    g.finish();
}

fn husimi(c: &mut Criterion) {
    let mut g = c.benchmark_group("husimi_sweep");
    g.sample_size(10);
    let spec = spectrum(50.0);
    let mask = ChaoticMask::uniform(PhaseGrid::new(150).unwrap(), 1);
    g.bench_function("S50_N150", |b| b.iter(|| black_box(husimi_sweep(&spec, &mask, &[]))));
    g.finish();
}

fn otoc(c: &mut Criterion) {
    let mut g = c.benchmark_group("otoc");
    g.sample_size(10);
    let spec = spectrum(50.0);
    let engine = OtocEngine::new(&spec, PhaseGrid::new(150).unwrap());
    g.bench_function("series_S50_N150_4_times", |b| b.iter(|| black_box(engine.series(&[0, 5, 20, 100]))));
    g.bench_function("analytic_S50_N150", |b| {
        b.iter(|| black_box(engine.longtime_analytic(AnalyticForm::Fourth)))
    });
    g.finish();
}

fn classical(c: &mut Criterion) {
    let mut g = c.benchmark_group("mask");
    g.sample_size(10);
    let grid = PhaseGrid::new(300).unwrap();
    g.bench_function("1e6_kicks", |b| {
        b.iter(|| black_box(chaotic_mask(ALPHA, KAPPA, grid, 1_000_000, SeedChoice::Auto { rng_seed: 1 }).unwrap()))
    });
    g.finish();
}

criterion_group!(benches, coherent_states, floquet, husimi, otoc, classical);
criterion_main!(benches);
