//! Fixed-radius neighbor grid over a bounded window.
//!
//! The grid buckets points into square cells of edge length at least
//! `cell_size`, so a radius query with `r <= cell_size` only needs to scan
//! the cells overlapping the query ball (at most a 3x3 ring). The grid is
//! single-writer: it is mutated only by the chain that owns it.

use super::{Point, Window};

/// Cap on buckets per axis; cells are widened beyond `cell_size` when the
/// window span would otherwise demand more.
const MAX_CELLS_PER_AXIS: usize = 512;

#[derive(Clone, Debug)]
pub struct NeighborGrid {
    cell_size: f64,
    bucket_edge: f64,
    x0: f64,
    y0: f64,
    nx: usize,
    ny: usize,
    buckets: Vec<Vec<(u32, Point)>>,
    point_count: usize,
}

impl NeighborGrid {
    /// An empty grid covering `window`, supporting queries up to `cell_size`.
    pub fn new(window: &Window, cell_size: f64) -> Self {
        assert!(
            cell_size.is_finite() && cell_size > 0.0,
            "cell_size must be positive"
        );
        let (lo, hi) = window.bounding_box();
        let span_x = hi.x - lo.x;
        let span_y = hi.y - lo.y;
        let bucket_edge = cell_size
            .max(span_x / MAX_CELLS_PER_AXIS as f64)
            .max(span_y / MAX_CELLS_PER_AXIS as f64);
        let nx = ((span_x / bucket_edge).ceil() as usize).max(1);
        let ny = ((span_y / bucket_edge).ceil() as usize).max(1);
        NeighborGrid {
            cell_size,
            bucket_edge,
            x0: lo.x,
            y0: lo.y,
            nx,
            ny,
            buckets: vec![Vec::new(); nx * ny],
            point_count: 0,
        }
    }

    /// Build a grid holding `points` with indices `0..points.len()`.
    pub fn from_points(window: &Window, cell_size: f64, points: &[Point]) -> Self {
        let mut g = NeighborGrid::new(window, cell_size);
        for (i, p) in points.iter().enumerate() {
            g.insert(i as u32, *p);
        }
        g
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn point_count(&self) -> usize {
        self.point_count
    }

    fn cell_of(&self, p: Point) -> (usize, usize) {
        let cx = ((p.x - self.x0) / self.bucket_edge).floor() as isize;
        let cy = ((p.y - self.y0) / self.bucket_edge).floor() as isize;
        (
            cx.clamp(0, self.nx as isize - 1) as usize,
            cy.clamp(0, self.ny as isize - 1) as usize,
        )
    }

    pub fn insert(&mut self, index: u32, p: Point) {
        let (cx, cy) = self.cell_of(p);
        self.buckets[cy * self.nx + cx].push((index, p));
        self.point_count += 1;
    }

    /// Remove `(index, p)`; the pair must be present.
    pub fn remove(&mut self, index: u32, p: Point) {
        let (cx, cy) = self.cell_of(p);
        let bucket = &mut self.buckets[cy * self.nx + cx];
        let pos = bucket
            .iter()
            .position(|&(i, _)| i == index)
            .expect("NeighborGrid::remove: point not present in its bucket");
        bucket.swap_remove(pos);
        self.point_count -= 1;
    }

    /// Visit every stored point within distance `r` of `p` (closed ball),
    /// skipping `exclude` when supplied. Requires `r <= cell_size`.
    pub fn for_neighbors<F: FnMut(u32, f64)>(
        &self,
        p: Point,
        r: f64,
        exclude: Option<u32>,
        mut f: F,
    ) {
        assert!(
            r <= self.cell_size,
            "query radius {r} exceeds grid cell size {}",
            self.cell_size
        );
        let cx_lo = (((p.x - r - self.x0) / self.bucket_edge).floor() as isize)
            .clamp(0, self.nx as isize - 1) as usize;
        let cx_hi = (((p.x + r - self.x0) / self.bucket_edge).floor() as isize)
            .clamp(0, self.nx as isize - 1) as usize;
        let cy_lo = (((p.y - r - self.y0) / self.bucket_edge).floor() as isize)
            .clamp(0, self.ny as isize - 1) as usize;
        let cy_hi = (((p.y + r - self.y0) / self.bucket_edge).floor() as isize)
            .clamp(0, self.ny as isize - 1) as usize;
        // Cheap squared-distance prefilter; the exact sqrt-based test only
        // runs for candidates near or inside the ball.
        let r2_upper = r * r * (1.0 + 1e-12);
        for cy in cy_lo..=cy_hi {
            for cx in cx_lo..=cx_hi {
                for &(idx, q) in &self.buckets[cy * self.nx + cx] {
                    if exclude == Some(idx) {
                        continue;
                    }
                    let d2 = p.dist2(q);
                    if d2 > r2_upper {
                        continue;
                    }
                    let d = d2.sqrt();
                    if d <= r {
                        f(idx, d);
                    }
                }
            }
        }
    }

    /// All stored points within distance `r` of `p`, with their distances.
    pub fn neighbors_within(&self, p: Point, r: f64, exclude: Option<u32>) -> Vec<(u32, f64)> {
        let mut out = Vec::new();
        self.for_neighbors(p, r, exclude, |idx, d| out.push((idx, d)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn brute_force(points: &[(u32, Point)], p: Point, r: f64, exclude: Option<u32>) -> Vec<u32> {
        let mut out: Vec<u32> = points
            .iter()
            .filter(|&&(i, q)| exclude != Some(i) && p.dist(q) <= r)
            .map(|&(i, _)| i)
            .collect();
        out.sort_unstable();
        out
    }

    #[test]
    fn empty_grid_has_no_neighbors() {
        let w = Window::rect(0.0, 0.0, 1.0, 1.0).unwrap();
        let g = NeighborGrid::new(&w, 0.25);
        assert!(g.neighbors_within(Point::new(0.5, 0.5), 0.25, None).is_empty());
        assert_eq!(g.point_count(), 0);
    }

    #[test]
    fn point_at_exact_radius_is_included() {
        let w = Window::rect(0.0, 0.0, 2.0, 2.0).unwrap();
        let mut g = NeighborGrid::new(&w, 1.0);
        g.insert(0, Point::new(1.5, 1.0));
        let nbrs = g.neighbors_within(Point::new(1.0, 1.0), 0.5, None);
        assert_eq!(nbrs.len(), 1);
        assert_eq!(nbrs[0].0, 0);
        assert!((nbrs[0].1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn insert_then_remove_restores_grid() {
        let w = Window::rect(0.0, 0.0, 1.0, 1.0).unwrap();
        let mut g = NeighborGrid::new(&w, 0.2);
        g.insert(0, Point::new(0.3, 0.3));
        let before = g.neighbors_within(Point::new(0.3, 0.3), 0.2, None).len();
        g.insert(1, Point::new(0.31, 0.31));
        g.remove(1, Point::new(0.31, 0.31));
        let after = g.neighbors_within(Point::new(0.3, 0.3), 0.2, None).len();
        assert_eq!(before, after);
        assert_eq!(g.point_count(), 1);
    }

    #[test]
    #[should_panic(expected = "not present")]
    fn removing_absent_point_panics() {
        let w = Window::rect(0.0, 0.0, 1.0, 1.0).unwrap();
        let mut g = NeighborGrid::new(&w, 0.2);
        g.remove(7, Point::new(0.5, 0.5));
    }

    #[test]
    fn matches_brute_force_under_churn() {
        let w = Window::disc(Point::new(0.0, 0.0), 1350.0).unwrap();
        let r_query = 100.0;
        let mut g = NeighborGrid::new(&w, r_query);
        let mut live: Vec<(u32, Point)> = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let mut next_id = 0u32;
        for step in 0..1000 {
            if live.is_empty() || rng.random::<f64>() < 0.6 {
                let p = w.sample_uniform(&mut rng);
                g.insert(next_id, p);
                live.push((next_id, p));
                next_id += 1;
            } else {
                let k = rng.random_range(0..live.len());
                let (idx, p) = live.swap_remove(k);
                g.remove(idx, p);
            }
            if step % 50 == 0 {
                let q = w.sample_uniform(&mut rng);
                let mut got: Vec<u32> = g
                    .neighbors_within(q, r_query, None)
                    .into_iter()
                    .map(|(i, _)| i)
                    .collect();
                got.sort_unstable();
                assert_eq!(got, brute_force(&live, q, r_query, None));
            }
        }
        assert_eq!(g.point_count(), live.len());
    }

    #[test]
    fn random_disc_pattern_matches_brute_force() {
        let w = Window::disc(Point::new(0.0, 0.0), 1350.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let points: Vec<Point> = (0..500).map(|_| w.sample_uniform(&mut rng)).collect();
        let indexed: Vec<(u32, Point)> = points
            .iter()
            .enumerate()
            .map(|(i, &p)| (i as u32, p))
            .collect();
        let g = NeighborGrid::from_points(&w, 100.0, &points);
        for &(i, p) in indexed.iter().step_by(17) {
            let mut got: Vec<u32> = g
                .neighbors_within(p, 100.0, Some(i))
                .into_iter()
                .map(|(j, _)| j)
                .collect();
            got.sort_unstable();
            assert_eq!(got, brute_force(&indexed, p, 100.0, Some(i)));
        }
    }
}
