//! Sequential versus data-parallel registration, with the naive grid as a
//! reference point. Build with `--no-default-features` to time the fallback
//! path alone.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pivotsweep::oracle::grid_search;
use pivotsweep::synth::{add_gaussian_noise, gen_disk_cloud, random_subset, rotate_cloud, Seed};
use pivotsweep::{register, Parallelism, PointCloud, RegisterOptions};

fn instance(n: usize) -> (PointCloud, PointCloud) {
    let x = gen_disk_cloud(n, Seed(1)).unwrap();
    let part = random_subset(&x, n / 2, Seed(2)).unwrap();
    let y = add_gaussian_noise(&rotate_cloud(&part, 2.0), 0.01, Seed(3)).unwrap();
    (x, y)
}

fn sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("register");
    group.sample_size(10);
    for n in [30, 60, 120] {
        let (x, y) = instance(n);
        for (name, par) in [
            ("sequential", Parallelism::Sequential),
            ("parallel", Parallelism::Auto),
        ] {
            let opts = RegisterOptions::default().with_parallelism(par);
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, _| {
                b.iter(|| register(black_box(&x), black_box(&y), 0.01, &opts).unwrap())
            });
        }
    }
    group.finish();
}

fn grid(c: &mut Criterion) {
    let mut group = c.benchmark_group("grid_g100");
    group.sample_size(10);
    let (x, y) = instance(30);
    group.bench_function("30", |b| {
        b.iter(|| grid_search(black_box(&x), black_box(&y), 0.01, 100).unwrap())
    });
    group.finish();
}

criterion_group!(benches, sweep, grid);
criterion_main!(benches);
