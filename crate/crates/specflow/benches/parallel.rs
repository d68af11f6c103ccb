use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use specflow::diagnostics::{correlation, rigidity_scan, BoxSet};
use specflow::par::Exec;
use specflow::roof::{RoofDescriptor, RoofFunction};
use specflow::rotations::{palindromic_pair, RotationVector2};
use specflow::specflow::uniform_sample;

fn modes() -> [(&'static str, Exec); 2] {
    [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)]
}

fn bench_sampling(c: &mut Criterion) {
    let rot = RotationVector2::golden_silver();
    let f = RoofFunction::new(RoofDescriptor::linear(1.0, 2f64.sqrt(), 3.0), &rot).unwrap();
    let mut g = c.benchmark_group("uniform_sample");
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::new(name, 100_000), &exec, |b, &e| {
            b.iter(|| uniform_sample(&f, black_box(100_000), 1, e).unwrap())
        });
    }
    g.finish();
}

fn bench_correlation(c: &mut Criterion) {
    let rot = RotationVector2::golden_silver();
    let f = RoofFunction::new(RoofDescriptor::linear(1.0, 2f64.sqrt(), 3.0), &rot).unwrap();
    let a = BoxSet { x: (0.1, 0.4), y: (0.2, 0.6), s: (0.0, 2.0) };
    let times = [10.0, 100.0, 1000.0];
    let mut g = c.benchmark_group("correlation");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::new(name, 20_000), &exec, |b, &e| {
            b.iter(|| correlation(&f, &rot, &a, &a, &times, black_box(20_000), 2, e).unwrap())
        });
    }
    g.finish();
}

fn bench_rigidity(c: &mut Criterion) {
    let pal = palindromic_pair(64).unwrap();
    let f = RoofFunction::new(RoofDescriptor::linear(1.0, 2.0, 3.0), &pal.rotation).unwrap();
    let dens = &pal.common_denominators[..3];
    let mut g = c.benchmark_group("rigidity_scan");
    g.sample_size(10);
    for (name, exec) in modes() {
        g.bench_with_input(BenchmarkId::new(name, 200), &exec, |b, &e| {
            b.iter(|| rigidity_scan(&f, &pal.rotation, dens, black_box(200), 3, e).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, bench_sampling, bench_correlation, bench_rigidity);
criterion_main!(benches);
