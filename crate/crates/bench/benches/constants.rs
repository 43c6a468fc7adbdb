use criterion::{criterion_group, criterion_main, Criterion};
use rggcc::analytics::{mu_n, sigma2n_sq_mc};
use rggcc::{derive_stream, table1_reproduce, CircularDensity};
use std::hint::black_box;

fn bench_constants(c: &mut Criterion) {
    c.bench_function("von_mises_k5_constants", |b| {
        b.iter(|| {
            CircularDensity::von_mises(black_box(5.0), 0.1)
                .unwrap()
                .constants()
                .unwrap()
        })
    });
    c.bench_function("table1", |b| b.iter(|| table1_reproduce(0.005).unwrap()));
}

fn bench_centering(c: &mut Criterion) {
    let density = CircularDensity::von_mises(1.0, 0.0).unwrap();
    c.bench_function("mu_n_r0.05", |b| {
        b.iter(|| mu_n(&density, black_box(0.05)).unwrap())
    });
    let mu = mu_n(&density, 0.01).unwrap().exact;
    let mut group = c.benchmark_group("sigma2n");
    group.sample_size(10);
    group.bench_function("mc_100k", |b| {
        b.iter(|| sigma2n_sq_mc(&density, 0.01, mu, 100_000, &mut derive_stream(1, 0)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_constants, bench_centering);
criterion_main!(benches);
