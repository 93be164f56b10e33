//! Nonparametric summaries: Ripley's K, the local (LISA) pair correlation
//! estimator, and bootstrap confidence bands with replicate pooling.
//!
//! The local PCF of point `i` is kernel-smoothed:
//!
//! ```text
//! g_i(r) = A / (2 pi n r) * Σ_{j != i} k(||x_i - x_j|| - r)
//! k(t)   = 3/(4 delta) * max(0, 1 - t^2/delta^2)
//! ```
//!
//! with no edge correction, and the pattern estimate is the mean of the
//! local curves. Bootstrap bands resample local curves with replacement;
//! for replicate sets the curves are pooled across replicates first.

use crate::geometry::{Point, PointPattern, Window};
use crate::model::ReplicateSet;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SummaryError {
    #[error("need at least {need} points, found {found}")]
    TooFewPoints { need: usize, found: usize },
    #[error("invalid radius grid: {0}")]
    BadGrid(&'static str),
    #[error("smoothing bandwidth must be > 0")]
    BadBandwidth,
    #[error("bootstrap replicate count must be >= 1")]
    BadBootstrapCount,
}

/// Strictly increasing positive radii at which summaries are evaluated.
#[derive(Clone, Debug, PartialEq)]
pub struct RadiusGrid {
    values: Vec<f64>,
}

impl RadiusGrid {
    pub fn new(values: Vec<f64>) -> Result<Self, SummaryError> {
        if values.is_empty() {
            return Err(SummaryError::BadGrid("grid must be non-empty"));
        }
        if !values.iter().all(|v| v.is_finite() && *v > 0.0) {
            return Err(SummaryError::BadGrid("radii must be positive and finite"));
        }
        if !values.windows(2).all(|w| w[0] < w[1]) {
            return Err(SummaryError::BadGrid("radii must be strictly increasing"));
        }
        Ok(RadiusGrid { values })
    }

    pub fn linspace(lo: f64, hi: f64, n: usize) -> Result<Self, SummaryError> {
        if n < 2 || lo.is_nan() || hi.is_nan() || lo <= 0.0 || hi <= lo {
            return Err(SummaryError::BadGrid("need 0 < lo < hi and n >= 2"));
        }
        let step = (hi - lo) / (n - 1) as f64;
        RadiusGrid::new((0..n).map(|i| lo + step * i as f64).collect())
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Default smoothing bandwidth `0.1 / sqrt(rho)` with `rho` the pooled
/// intensity estimate.
pub fn default_bandwidth(reps: &ReplicateSet) -> f64 {
    let area = reps.window().area();
    let rho = reps.total_points() as f64 / (reps.len() as f64 * area);
    0.1 / rho.sqrt()
}

/// Default radius grid: 512 radii from the bandwidth out to 100 px.
pub fn default_grid(delta: f64) -> Result<RadiusGrid, SummaryError> {
    RadiusGrid::linspace(delta, 100.0, 512)
}

/// The Epanechnikov-type smoothing kernel; integrates to 1 over its
/// support `[-delta, delta]`.
pub fn smoothing_kernel(t: f64, delta: f64) -> f64 {
    3.0 / (4.0 * delta) * (1.0 - t * t / (delta * delta)).max(0.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeCorrection {
    None,
    /// Weight each pair by the inverse of the fraction of the circle of
    /// radius `d_ij` centered at `x_i` that lies inside the window.
    Isotropic,
}

/// Ripley's K estimate on the grid:
/// `K(r) = A/(n(n-1)) Σ_i Σ_{j != i} 1{d_ij < r} e_ij`.
pub fn k_hat(
    pattern: &PointPattern,
    grid: &RadiusGrid,
    correction: EdgeCorrection,
) -> Result<Vec<f64>, SummaryError> {
    let n = pattern.len();
    if n < 2 {
        return Err(SummaryError::TooFewPoints { need: 2, found: n });
    }
    let area = pattern.window().area();
    let pts = pattern.points();
    let norm = area / (n as f64 * (n - 1) as f64);
    match correction {
        EdgeCorrection::None => {
            let mut dists = Vec::with_capacity(n * (n - 1) / 2);
            for i in 0..n {
                for j in (i + 1)..n {
                    dists.push(pts[i].dist(pts[j]));
                }
            }
            dists.sort_by(|a, b| a.partial_cmp(b).unwrap());
            Ok(grid
                .values()
                .iter()
                .map(|&r| {
                    let count = dists.partition_point(|&d| d < r);
                    norm * (2 * count) as f64
                })
                .collect())
        }
        EdgeCorrection::Isotropic => {
            let mut weighted: Vec<(f64, f64)> = Vec::with_capacity(n * (n - 1));
            for i in 0..n {
                for j in 0..n {
                    if i == j {
                        continue;
                    }
                    let d = pts[i].dist(pts[j]);
                    let frac = circle_inside_fraction(pattern.window(), pts[i], d);
                    weighted.push((d, 1.0 / frac));
                }
            }
            weighted.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut prefix = Vec::with_capacity(weighted.len() + 1);
            prefix.push(0.0);
            for &(_, w) in &weighted {
                prefix.push(prefix.last().unwrap() + w);
            }
            Ok(grid
                .values()
                .iter()
                .map(|&r| {
                    let count = weighted.partition_point(|&(d, _)| d < r);
                    norm * prefix[count]
                })
                .collect())
        }
    }
}

/// Fraction of the circle of radius `d` centered at `c` lying inside the
/// window (by arc length).
fn circle_inside_fraction(window: &Window, c: Point, d: f64) -> f64 {
    if d == 0.0 {
        return 1.0;
    }
    match *window {
        Window::Disc { center, radius } => {
            let e = c.dist(center);
            if e + d <= radius {
                return 1.0;
            }
            let cos_a = (e * e + d * d - radius * radius) / (2.0 * e * d);
            cos_a.clamp(-1.0, 1.0).acos() / PI
        }
        Window::Rect {
            x_min,
            y_min,
            x_max,
            y_max,
        } => {
            // Collect the angles where the circle crosses each side line,
            // then sum the arcs whose midpoints fall inside the rectangle.
            let mut angles = vec![0.0, 2.0 * PI];
            let mut push_cos = |x_line: f64| {
                let c_val = (x_line - c.x) / d;
                if c_val.abs() <= 1.0 {
                    let a = c_val.acos();
                    angles.push(a);
                    angles.push(2.0 * PI - a);
                }
            };
            push_cos(x_min);
            push_cos(x_max);
            let mut push_sin = |y_line: f64| {
                let s = (y_line - c.y) / d;
                if s.abs() <= 1.0 {
                    let a = s.asin();
                    angles.push(a.rem_euclid(2.0 * PI));
                    angles.push((PI - a).rem_euclid(2.0 * PI));
                }
            };
            push_sin(y_min);
            push_sin(y_max);
            angles.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut inside = 0.0;
            for w in angles.windows(2) {
                let mid = 0.5 * (w[0] + w[1]);
                let p = Point::new(c.x + d * mid.cos(), c.y + d * mid.sin());
                if p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max {
                    inside += w[1] - w[0];
                }
            }
            inside / (2.0 * PI)
        }
    }
}

/// Local PCF rows; permits a single-point pattern (whose row is zero).
fn lisa_rows(pattern: &PointPattern, grid: &RadiusGrid, delta: f64) -> Vec<Vec<f64>> {
    let n = pattern.len();
    let pts = pattern.points();
    let area = pattern.window().area();
    let rv = grid.values();
    let mut rows = vec![vec![0.0; rv.len()]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = pts[i].dist(pts[j]);
            // The kernel supports radii in (d - delta, d + delta).
            let lo = rv.partition_point(|&r| r <= d - delta);
            for (col, &r) in rv.iter().enumerate().skip(lo) {
                if r >= d + delta {
                    break;
                }
                let kv = smoothing_kernel(d - r, delta);
                if kv > 0.0 {
                    let scale = area / (2.0 * PI * n as f64 * r);
                    rows[i][col] += scale * kv;
                    rows[j][col] += scale * kv;
                }
            }
        }
    }
    rows
}

/// Per-point local pair correlation curves (`n` rows over the grid).
pub fn lisa_pcf(
    pattern: &PointPattern,
    grid: &RadiusGrid,
    delta: f64,
) -> Result<Vec<Vec<f64>>, SummaryError> {
    if pattern.len() < 2 {
        return Err(SummaryError::TooFewPoints {
            need: 2,
            found: pattern.len(),
        });
    }
    if !(delta.is_finite() && delta > 0.0) {
        return Err(SummaryError::BadBandwidth);
    }
    Ok(lisa_rows(pattern, grid, delta))
}

/// Pattern-level PCF point estimate: the mean of the pooled local curves.
pub fn pooled_point_estimate(rows: &[Vec<f64>], n_radii: usize) -> Vec<f64> {
    let mut out = vec![0.0; n_radii];
    if rows.is_empty() {
        return out;
    }
    for row in rows {
        for (o, v) in out.iter_mut().zip(row) {
            *o += v;
        }
    }
    for o in &mut out {
        *o /= rows.len() as f64;
    }
    out
}

/// Pooled PCF point estimate across replicates (no bands): the mean of
/// every point's local curve.
pub fn empirical_pcf(
    reps: &ReplicateSet,
    grid: &RadiusGrid,
    delta: f64,
) -> Result<Vec<f64>, SummaryError> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(SummaryError::BadBandwidth);
    }
    let total = reps.total_points();
    if total < 2 {
        return Err(SummaryError::TooFewPoints {
            need: 2,
            found: total,
        });
    }
    let mut pool: Vec<Vec<f64>> = Vec::with_capacity(total);
    for pat in reps.patterns() {
        pool.extend(lisa_rows(pat, grid, delta));
    }
    Ok(pooled_point_estimate(&pool, grid.len()))
}

/// PCF values on a radius grid with pointwise bootstrap bands.
#[derive(Clone, Debug)]
pub struct PcfEstimate {
    pub grid: RadiusGrid,
    pub g_hat: Vec<f64>,
    pub lo95: Vec<f64>,
    pub hi95: Vec<f64>,
    pub n_boot: usize,
    pub bandwidth: f64,
}

/// Bootstrap PCF bands by resampling pooled local curves with replacement.
///
/// Each bootstrap draw resamples pool-size indices uniformly from the pooled
/// curves; bands are the pointwise 2.5%/97.5% empirical quantiles over the
/// draws (type-7 interpolation). Deterministic in `seed`.
pub fn loh_bootstrap(
    reps: &ReplicateSet,
    grid: &RadiusGrid,
    delta: f64,
    n_boot: usize,
    seed: u64,
) -> Result<PcfEstimate, SummaryError> {
    if !(delta.is_finite() && delta > 0.0) {
        return Err(SummaryError::BadBandwidth);
    }
    if n_boot < 1 {
        return Err(SummaryError::BadBootstrapCount);
    }
    let total = reps.total_points();
    if total < 2 {
        return Err(SummaryError::TooFewPoints {
            need: 2,
            found: total,
        });
    }
    let n_radii = grid.len();
    let mut pool: Vec<Vec<f64>> = Vec::with_capacity(total);
    for pat in reps.patterns() {
        pool.extend(lisa_rows(pat, grid, delta));
    }
    let g_hat = pooled_point_estimate(&pool, n_radii);

    let n_pool = pool.len();
    let draws: Vec<Vec<f64>> = (0..n_boot)
        .into_par_iter()
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(b as u64 + 1);
            let mut mean = vec![0.0; n_radii];
            for _ in 0..n_pool {
                let pick = rng.random_range(0..n_pool);
                for (m, v) in mean.iter_mut().zip(&pool[pick]) {
                    *m += v;
                }
            }
            for m in &mut mean {
                *m /= n_pool as f64;
            }
            mean
        })
        .collect();

    let mut lo95 = Vec::with_capacity(n_radii);
    let mut hi95 = Vec::with_capacity(n_radii);
    let mut col = vec![0.0; n_boot];
    for r in 0..n_radii {
        for (b, draw) in draws.iter().enumerate() {
            col[b] = draw[r];
        }
        col.sort_by(|a, b| a.partial_cmp(b).unwrap());
        lo95.push(quantile_type7(&col, 0.025));
        hi95.push(quantile_type7(&col, 0.975));
    }
    Ok(PcfEstimate {
        grid: grid.clone(),
        g_hat,
        lo95,
        hi95,
        n_boot,
        bandwidth: delta,
    })
}

/// Type-7 (linear interpolation) quantile of pre-sorted values.
pub fn quantile_type7(sorted: &[f64], q: f64) -> f64 {
    assert!(!sorted.is_empty());
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    if lo + 1 >= n {
        return sorted[n - 1];
    }
    sorted[lo] + (h - lo as f64) * (sorted[lo + 1] - sorted[lo])
}
