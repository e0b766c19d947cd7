//! Throughput of the data-parallel batch paths against single-thread
//! execution of the same code.
//!
//! With the default `parallel` feature the batch transform and the profile
//! grid fan out over a rayon pool; installing the call into a one-thread
//! pool pins the identical code to a single worker, so the two arms differ
//! only in scheduling. The `sequential_loop` arm is the hand-written loop a
//! caller would otherwise use. Building with `--no-default-features`
//! compiles the sequential fallback instead, collapsing the arms to the
//! same numbers — useful for measuring what the feature actually buys.

use std::hint::black_box;
use std::time::Duration;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use jgft::dense::DenseMatrix;
use jgft::fixtures;
use jgft::gft::{batch_gft, gft};
use jgft::jordan::jordan_decompose;
use jgft::tv::tv_profile;
use jgft::ToleranceConfig;
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn single_thread_pool() -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .expect("thread pool")
}

fn random_unit(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
}

fn bench_batch_gft(c: &mut Criterion) {
    let tol = ToleranceConfig::default();
    let n = 64;
    let mut rng = ChaCha8Rng::seed_from_u64(0xBE7C);
    // A generic dense graph is diagonalizable with distinct eigenvalues,
    // so the decomposition is routine and the transform has n components.
    let a = DenseMatrix::from_fn(n, n, |_, _| random_unit(&mut rng));
    let d = jordan_decompose(&a, &tol).expect("generic dense decomposition");
    let signals: Vec<Vec<Complex64>> = (0..256)
        .map(|_| (0..n).map(|_| random_unit(&mut rng)).collect())
        .collect();
    let pool = single_thread_pool();

    let mut group = c.benchmark_group("batch_gft_64x256");
    group.sample_size(20);
    group.warm_up_time(Duration::from_millis(500));
    group.measurement_time(Duration::from_secs(3));
    group.bench_function("threaded", |b| {
        b.iter(|| batch_gft(black_box(&d), black_box(&signals)).unwrap())
    });
    group.bench_function("single_thread", |b| {
        b.iter(|| pool.install(|| batch_gft(black_box(&d), black_box(&signals)).unwrap()))
    });
    group.bench_function("sequential_loop", |b| {
        b.iter(|| {
            signals
                .iter()
                .map(|s| gft(black_box(&d), s).unwrap())
                .collect::<Vec<_>>()
        })
    });
    group.finish();
}

fn bench_tv_profile(c: &mut Criterion) {
    let tol = ToleranceConfig::default();
    let a = fixtures::demo_shift().to_dense();
    let d = jordan_decompose(&a, &tol).expect("embedded example decomposition");
    let i = d
        .eigenvalues
        .iter()
        .position(|e| e.value.norm() < 0.5)
        .expect("zero eigenvalue");
    let idx = d.chain_index(i, 1).expect("length-2 chain");
    let d1 = d
        .with_block_columns(idx, &fixtures::demo_block_chain(0).to_dense())
        .expect("install the reference chain");
    let free = fixtures::DEMO_FREE_COMPONENT;
    let pool = single_thread_pool();

    let mut group = c.benchmark_group("tv_profile");
    group.sample_size(20);
    group.warm_up_time(Duration::from_millis(500));
    group.measurement_time(Duration::from_secs(3));
    for points in [251usize, 2001] {
        let grid: Vec<f64> = (0..points)
            .map(|k| -6.0 + 12.0 * k as f64 / (points - 1) as f64)
            .collect();
        group.bench_with_input(BenchmarkId::new("threaded", points), &grid, |b, grid| {
            b.iter(|| tv_profile(black_box(&d1), i, 1, free, black_box(grid)).unwrap())
        });
        group.bench_with_input(
            BenchmarkId::new("single_thread", points),
            &grid,
            |b, grid| {
                b.iter(|| {
                    pool.install(|| tv_profile(black_box(&d1), i, 1, free, black_box(grid)).unwrap())
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, bench_batch_gft, bench_tv_profile);
criterion_main!(benches);
