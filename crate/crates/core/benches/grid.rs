use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use umbilic_core::gallery::{args, build};
use umbilic_core::lines::{find_umbilics, scan_grid, Region, UmbilicOptions};
use umbilic_core::Exec;

fn strategies() -> Vec<(&'static str, Exec)> {
    let mut v = vec![("sequential", Exec::Sequential)];
    #[cfg(feature = "rayon")]
    v.push(("parallel", Exec::Parallel));
    v
}

fn grid_scan(c: &mut Criterion) {
    let s = build("ellipsoid", &args([])).unwrap();
    let region = Region::Rect(s.domain());
    let mut group = c.benchmark_group("scan_grid/ellipsoid");
    for n in [32usize, 128] {
        for (name, exec) in strategies() {
            group.bench_with_input(BenchmarkId::new(name, n), &n, |b, &n| {
                b.iter(|| scan_grid(black_box(&s.pair), &region, n, exec))
            });
        }
    }
    group.finish();
}

fn umbilic_search(c: &mut Criterion) {
    let s = build("ellipsoid", &args([])).unwrap();
    let region = Region::Rect(s.domain());
    let opts = UmbilicOptions::default();
    let mut group = c.benchmark_group("find_umbilics/ellipsoid");
    group.sample_size(10);
    for (name, exec) in strategies() {
        group.bench_function(name, |b| b.iter(|| find_umbilics(black_box(&s.pair), &region, &opts, exec)));
    }
    group.finish();
}

criterion_group!(benches, grid_scan, umbilic_search);
criterion_main!(benches);
