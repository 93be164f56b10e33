//! Fixed-radius queries: the grid against a full scan.

use argibbs::{NeighborGrid, Point, Window};
use criterion::{criterion_group, criterion_main, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::hint::black_box;

fn bench_neighbors(c: &mut Criterion) {
    let window = Window::disc(Point::new(0.0, 0.0), 1350.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let points: Vec<Point> = (0..2000).map(|_| window.sample_uniform(&mut rng)).collect();
    let grid = NeighborGrid::from_points(&window, 100.0, &points);
    let queries: Vec<Point> = (0..256).map(|_| window.sample_uniform(&mut rng)).collect();

    let mut group = c.benchmark_group("neighbors_within_r100_n2000");
    group.bench_function("grid", |b| {
        let mut i = 0;
        b.iter(|| {
            let q = queries[i % queries.len()];
            i += 1;
            let mut acc = 0.0;
            grid.for_neighbors(black_box(q), 100.0, None, |_, d| acc += d);
            black_box(acc)
        })
    });
    group.bench_function("full_scan", |b| {
        let mut i = 0;
        b.iter(|| {
            let q = queries[i % queries.len()];
            i += 1;
            let mut acc = 0.0;
            for p in &points {
                let d = q.dist(*p);
                if d <= 100.0 {
                    acc += d;
                }
            }
            black_box(acc)
        })
    });
    group.finish();
}

criterion_group!(benches, bench_neighbors);
criterion_main!(benches);
