use std::hint::black_box;

use aqrm_core::schrodinger::{eigenvalue_scan, ConnectionConfig};
use aqrm_core::{qes_points, regular_spectrum, solve_bethe, Branch, ModelParams};
use criterion::{criterion_group, criterion_main, Criterion};

const DELTA: f64 = 1.2;
const EPSILON: f64 = 0.3;
const OMEGA: f64 = 1.0;

fn constraint_roots(c: &mut Criterion) {
    c.bench_function("qes_points n = 1..5, both branches", |b| {
        b.iter(|| {
            for branch in Branch::BOTH {
                for n in 1..=5 {
                    black_box(qes_points(DELTA, EPSILON, OMEGA, n, branch).unwrap());
                }
            }
        })
    });
}

fn bethe_roots(c: &mut Criterion) {
    let point = qes_points(DELTA, EPSILON, OMEGA, 5, Branch::Plus)
        .unwrap()
        .points[2];
    let params = point.params(DELTA, EPSILON, OMEGA);
    c.bench_function("solve_bethe n = 5", |b| {
        b.iter(|| black_box(solve_bethe(&params, 5, Branch::Plus).unwrap()))
    });
}

fn diagonalization(c: &mut Criterion) {
    let params = ModelParams::new(DELTA, EPSILON, OMEGA, 0.7).unwrap();
    let mut group = c.benchmark_group("diagonalization");
    group.sample_size(10);
    group.bench_function("regular_spectrum 6 levels, truncation 200", |b| {
        b.iter(|| black_box(regular_spectrum(&params, 6, 200).unwrap()))
    });
    group.finish();
}

fn connection(c: &mut Criterion) {
    let params = ModelParams::new(DELTA, EPSILON, OMEGA, 0.7).unwrap();
    let cfg = ConnectionConfig::default();
    let mut group = c.benchmark_group("connection");
    group.sample_size(10);
    group.bench_function("eigenvalue_scan one unit of energy", |b| {
        b.iter(|| black_box(eigenvalue_scan(&params, Branch::Plus, (0.0, 1.0), 100, &cfg).unwrap()))
    });
    group.finish();
}

criterion_group!(
    benches,
    constraint_roots,
    bethe_roots,
    diagonalization,
    connection
);
criterion_main!(benches);
