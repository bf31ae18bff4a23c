use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dispersolve::duhamel::picard_map;
use dispersolve::lorentz::weak_lp_norm;
use dispersolve::reference::strang_step_model;
use dispersolve::spectral::propagate;
use dispersolve::{fft, DispersionSymbol, SolutionTrace};
use dispersolve_bench::{ds_model, gaussian_2d};

fn bench_fft(c: &mut Criterion) {
    let mut group = c.benchmark_group("fft_2d");
    for n in [64, 256] {
        let (grid, u) = gaussian_2d(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            let mut data = u.values().to_vec();
            b.iter(|| {
                fft::forward(&grid, &mut data);
                fft::inverse(&grid, &mut data);
                black_box(&data);
            })
        });
    }
    group.finish();
}

fn bench_propagate(c: &mut Criterion) {
    let (_, u) = gaussian_2d(256);
    let q = DispersionSymbol::laplacian();
    c.bench_function("propagate_256", |b| b.iter(|| propagate(black_box(&u), &q, 1.5).unwrap()));
}

fn bench_weak_norm(c: &mut Criterion) {
    let mut group = c.benchmark_group("weak_lp_norm");
    for n in [64, 256] {
        let (_, u) = gaussian_2d(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &u, |b, u| b.iter(|| weak_lp_norm(u, 4.0).unwrap()));
    }
    group.finish();
}

fn bench_strang(c: &mut Criterion) {
    let (grid, u) = gaussian_2d(256);
    let model = ds_model(&grid);
    c.bench_function("strang_step_256", |b| b.iter(|| strang_step_model(&model, black_box(&u), 0.01).unwrap()));
}

fn bench_picard(c: &mut Criterion) {
    let (grid, u) = gaussian_2d(64);
    let model = ds_model(&grid);
    let trace = SolutionTrace::linear(&model, &u, SolutionTrace::uniform_times(1.0, 17)).unwrap();
    c.bench_function("picard_map_64_nt17", |b| b.iter(|| picard_map(&model, &trace, &u).unwrap()));
}

criterion_group!(benches, bench_fft, bench_propagate, bench_weak_norm, bench_strang, bench_picard);
criterion_main!(benches);
