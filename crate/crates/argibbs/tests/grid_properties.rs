//! Property tests for the geometry layer and the knot solver.

use argibbs::{solve_knots, NeighborGrid, Point, Window};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn brute_neighbors(pts: &[(u32, Point)], q: Point, r: f64, exclude: Option<u32>) -> Vec<u32> {
    let mut out: Vec<u32> = pts
        .iter()
        .filter(|&&(i, p)| exclude != Some(i) && q.dist(p) <= r)
        .map(|&(i, _)| i)
        .collect();
    out.sort_unstable();
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn neighbors_match_brute_force(seed in 0u64..1_000_000, n in 0usize..400) {
        let w = Window::disc(Point::new(0.0, 0.0), 500.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<(u32, Point)> = (0..n)
            .map(|i| (i as u32, w.sample_uniform(&mut rng)))
            .collect();
        let cell = 80.0;
        let grid = NeighborGrid::from_points(&w, cell, &pts.iter().map(|&(_, p)| p).collect::<Vec<_>>());
        for _ in 0..5 {
            let q = w.sample_uniform(&mut rng);
            let r = rng.random_range(1.0..cell);
            let mut got: Vec<u32> = grid
                .neighbors_within(q, r, None)
                .into_iter()
                .map(|(i, _)| i)
                .collect();
            got.sort_unstable();
            prop_assert_eq!(got, brute_neighbors(&pts, q, r, None));
        }
    }

    #[test]
    fn churned_grid_equals_rebuilt_grid(seed in 0u64..1_000_000) {
        let w = Window::rect(-200.0, -100.0, 300.0, 400.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut grid = NeighborGrid::new(&w, 60.0);
        let mut live: Vec<(u32, Point)> = Vec::new();
        let mut next = 0u32;
        for _ in 0..300 {
            if live.is_empty() || rng.random::<f64>() < 0.6 {
                let p = w.sample_uniform(&mut rng);
                grid.insert(next, p);
                live.push((next, p));
                next += 1;
            } else {
                let k = rng.random_range(0..live.len());
                let (idx, p) = live.swap_remove(k);
                grid.remove(idx, p);
            }
        }
        prop_assert_eq!(grid.point_count(), live.len());
        let rebuilt = {
            let mut g = NeighborGrid::new(&w, 60.0);
            for &(i, p) in &live {
                g.insert(i, p);
            }
            g
        };
        for _ in 0..10 {
            let q = w.sample_uniform(&mut rng);
            let mut a: Vec<u32> = grid.neighbors_within(q, 60.0, None).into_iter().map(|(i, _)| i).collect();
            let mut b: Vec<u32> = rebuilt.neighbors_within(q, 60.0, None).into_iter().map(|(i, _)| i).collect();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
        }
    }

    #[test]
    fn query_results_invariant_under_rebucketing(seed in 0u64..1_000_000) {
        // The bucket layout is an implementation detail: any cell size at
        // least as large as the query radius returns the same neighbors.
        let w = Window::disc(Point::new(0.0, 0.0), 300.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let pts: Vec<Point> = (0..200).map(|_| w.sample_uniform(&mut rng)).collect();
        let r = 40.0;
        let grids = [
            NeighborGrid::from_points(&w, r, &pts),
            NeighborGrid::from_points(&w, 1.7 * r, &pts),
            NeighborGrid::from_points(&w, 10.0 * r, &pts),
        ];
        for _ in 0..10 {
            let q = w.sample_uniform(&mut rng);
            let mut sets: Vec<Vec<u32>> = grids
                .iter()
                .map(|g| {
                    let mut v: Vec<u32> =
                        g.neighbors_within(q, r, None).into_iter().map(|(i, _)| i).collect();
                    v.sort_unstable();
                    v
                })
                .collect();
            let first = sets.remove(0);
            for other in sets {
                prop_assert_eq!(&first, &other);
            }
        }
    }

    #[test]
    fn uniform_samples_stay_inside(seed in 0u64..1_000_000, disc in any::<bool>()) {
        let w = if disc {
            Window::disc(Point::new(12.0, -5.0), 37.5).unwrap()
        } else {
            Window::rect(-3.0, 2.0, 19.0, 44.0).unwrap()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..200 {
            prop_assert!(w.contains(w.sample_uniform(&mut rng)));
        }
    }

    #[test]
    fn knot_solutions_satisfy_both_equations(
        t1 in 1.001f64..5.0,
        t2_frac in 0.0f64..1.0,
        t3 in 0.01f64..2.0,
        r in 0.0f64..5.0,
    ) {
        let t2 = r + 0.5 + t2_frac * (50.0 - r - 0.5);
        let (r1, r2) = solve_knots(t1, t2, t3, r).unwrap();
        prop_assert!(r1 > t2);
        prop_assert!(r2 < r1);
        let a = t1 / ((t2 - r) * (t2 - r));
        let y1 = t1 - a * (r1 - t2) * (r1 - t2);
        let y2 = 1.0 + 1.0 / (t3 * (r1 - r2)).powi(2);
        let dy1 = -2.0 * a * (r1 - t2);
        let dy2 = -2.0 / (t3 * t3 * (r1 - r2).powi(3));
        prop_assert!((y1 - y2).abs() < 1e-10);
        prop_assert!(((dy1 - dy2) / dy1.abs().max(dy2.abs())).abs() < 1e-10);
    }
}
