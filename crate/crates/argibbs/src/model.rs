//! The unnormalized model density and its incrementally updatable form.
//!
//! For a pattern `X = (x_1, ..., x_n)` the log unnormalized density is
//!
//! ```text
//! log h(X | Θ) = n log λ + Σ_i min(s_i, k),
//! s_i = Σ_{j != i} log φ(||x_i - x_j||)
//! ```
//!
//! where each unordered pair contributes to both endpoints' sums before the
//! per-point cap is applied. Pairs beyond the interaction range add zero, so
//! only neighbors within `range()` matter. Any pair inside the hard core
//! makes the density zero (`log h = -inf`).
//!
//! [`CachedPattern`] maintains the per-point sums, a neighbor grid, and the
//! capped total so that a single birth or death costs work proportional to
//! the local neighbor count. Zero-density states are tracked with explicit
//! hard-core pair counters rather than floating `-inf` arithmetic, so a
//! death can restore a finite likelihood correctly.

use crate::geometry::{GeometryError, NeighborGrid, Point, PointPattern, Window};
use crate::interaction::Interaction;
use smallvec::SmallVec;
use thiserror::Error;

/// Staged neighbor contributions; sized so typical neighborhoods stay
/// off the heap.
type NeighborVec = SmallVec<[(u32, f64); 24]>;

/// Full recomputation stride: every this many committed moves the per-point
/// sums are rebuilt from scratch to bound floating-point drift.
const REFRESH_STRIDE: usize = 50_000;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid model parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("replicate set must be non-empty")]
    EmptyReplicateSet,
    #[error("replicate {index} uses a different window than replicate 0")]
    WindowMismatch { index: usize },
    #[error(
        "points {i} and {j} in replicate {replicate} are {distance} apart, inside the hard core"
    )]
    HardCoreViolation {
        replicate: usize,
        i: usize,
        j: usize,
        distance: f64,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Model parameters: intensity `lambda`, saturation cap `k`, and the
/// pairwise interaction. The normalizing constant is never computed.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GibbsModel<I> {
    pub lambda: f64,
    pub sat_cap: f64,
    pub interaction: I,
}

impl<I: Interaction> GibbsModel<I> {
    pub fn new(lambda: f64, sat_cap: f64, interaction: I) -> Result<Self, ModelError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(ModelError::InvalidParameter("lambda must be > 0"));
        }
        if sat_cap.is_nan() || sat_cap <= 0.0 {
            return Err(ModelError::InvalidParameter("saturation cap must be > 0"));
        }
        Ok(GibbsModel {
            lambda,
            sat_cap,
            interaction,
        })
    }
}

/// Ordered replicate patterns sharing one observation window.
#[derive(Clone, Debug)]
pub struct ReplicateSet {
    patterns: Vec<PointPattern>,
}

impl ReplicateSet {
    pub fn new(patterns: Vec<PointPattern>) -> Result<Self, ModelError> {
        if patterns.is_empty() {
            return Err(ModelError::EmptyReplicateSet);
        }
        let w = *patterns[0].window();
        for (index, p) in patterns.iter().enumerate().skip(1) {
            if *p.window() != w {
                return Err(ModelError::WindowMismatch { index });
            }
        }
        Ok(ReplicateSet { patterns })
    }

    pub fn window(&self) -> &Window {
        self.patterns[0].window()
    }

    pub fn patterns(&self) -> &[PointPattern] {
        &self.patterns
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn total_points(&self) -> usize {
        self.patterns.iter().map(|p| p.len()).sum()
    }

    pub fn mean_points(&self) -> f64 {
        self.total_points() as f64 / self.patterns.len() as f64
    }
}

/// Log unnormalized density of `pattern` under `model`.
pub fn log_h<I: Interaction>(pattern: &PointPattern, model: &GibbsModel<I>) -> f64 {
    let range = model.interaction.range();
    let grid = NeighborGrid::from_points(pattern.window(), range, pattern.points());
    log_h_with_grid(pattern.points(), &grid, model)
}

/// Sum of `log_h` over the replicates.
pub fn log_h_replicates<I: Interaction>(reps: &ReplicateSet, model: &GibbsModel<I>) -> f64 {
    reps.patterns().iter().map(|p| log_h(p, model)).sum()
}

fn log_h_with_grid<I: Interaction>(
    points: &[Point],
    grid: &NeighborGrid,
    model: &GibbsModel<I>,
) -> f64 {
    let range = model.interaction.range();
    let mut capped = 0.0;
    let mut hard_core = false;
    for (i, p) in points.iter().enumerate() {
        let mut s = 0.0;
        grid.for_neighbors(*p, range, Some(i as u32), |_, d| {
            let w = model.interaction.log_phi(d);
            if w == f64::NEG_INFINITY {
                hard_core = true;
            } else {
                s += w;
            }
        });
        capped += s.min(model.sat_cap);
    }
    if hard_core {
        f64::NEG_INFINITY
    } else {
        points.len() as f64 * model.lambda.ln() + capped
    }
}

/// A staged birth: the likelihood change plus everything needed to commit.
/// Dropping it leaves the cache untouched.
#[derive(Debug)]
pub struct StagedBirth {
    point: Point,
    delta: f64,
    new_sum: f64,
    new_inf: u32,
    sat_delta: f64,
    neighbors: NeighborVec,
    stamp: u64,
}

impl StagedBirth {
    /// `log h(X ∪ ξ) - log h(X)`; `-inf` when the birth lands in a hard core.
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn point(&self) -> Point {
        self.point
    }
}

/// A staged death; mirrors [`StagedBirth`].
#[derive(Debug)]
pub struct StagedDeath {
    index: u32,
    delta: f64,
    sat_delta: f64,
    neighbors: NeighborVec,
    stamp: u64,
}

impl StagedDeath {
    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn index(&self) -> u32 {
        self.index
    }
}

/// A point pattern carrying per-point interaction sums and a neighbor grid,
/// supporting O(local) birth/death updates.
///
/// Owned by exactly one chain at a time; hand it between workers but never
/// share it mutably.
#[derive(Clone, Debug)]
pub struct CachedPattern<I> {
    model: GibbsModel<I>,
    window: Window,
    points: Vec<Point>,
    sums: Vec<f64>,
    inf_counts: Vec<u32>,
    grid: NeighborGrid,
    inf_pairs: usize,
    sat_total: f64,
    commits: usize,
    stamp: u64,
}

impl<I: Interaction + Clone> CachedPattern<I> {
    pub fn new(pattern: &PointPattern, model: GibbsModel<I>) -> Self {
        let range = model.interaction.range();
        let window = *pattern.window();
        let points = pattern.points().to_vec();
        let grid = NeighborGrid::from_points(&window, range, &points);
        let mut cache = CachedPattern {
            model,
            window,
            points,
            sums: Vec::new(),
            inf_counts: Vec::new(),
            grid,
            inf_pairs: 0,
            sat_total: 0.0,
            commits: 0,
            stamp: 0,
        };
        cache.refresh();
        cache
    }

    pub fn model(&self) -> &GibbsModel<I> {
        &self.model
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    /// Number of point pairs inside the hard core (zero-density witnesses).
    pub fn hard_core_pairs(&self) -> usize {
        self.inf_pairs
    }

    pub fn log_h(&self) -> f64 {
        if self.inf_pairs > 0 {
            f64::NEG_INFINITY
        } else {
            self.points.len() as f64 * self.model.lambda.ln() + self.sat_total
        }
    }

    pub fn into_pattern(self) -> PointPattern {
        PointPattern::new(self.window, self.points).expect("cached points stay inside the window")
    }

    pub fn to_pattern(&self) -> PointPattern {
        PointPattern::new(self.window, self.points.clone())
            .expect("cached points stay inside the window")
    }

    /// Rebuild per-point sums and totals from scratch.
    pub fn refresh(&mut self) {
        let range = self.model.interaction.range();
        let n = self.points.len();
        self.sums = vec![0.0; n];
        self.inf_counts = vec![0; n];
        let mut inf_total = 0usize;
        let mut sat = 0.0;
        for i in 0..n {
            let p = self.points[i];
            let mut s = 0.0;
            let mut inf = 0u32;
            self.grid.for_neighbors(p, range, Some(i as u32), |_, d| {
                let w = self.model.interaction.log_phi(d);
                if w == f64::NEG_INFINITY {
                    inf += 1;
                } else {
                    s += w;
                }
            });
            self.sums[i] = s;
            self.inf_counts[i] = inf;
            inf_total += inf as usize;
            sat += s.min(self.model.sat_cap);
        }
        debug_assert!(inf_total.is_multiple_of(2));
        self.inf_pairs = inf_total / 2;
        self.sat_total = sat;
    }

    /// Stage the birth of `xi` without mutating the cache.
    pub fn delta_birth(&self, xi: Point) -> StagedBirth {
        debug_assert!(self.window.contains(xi), "birth point outside window");
        let range = self.model.interaction.range();
        let k = self.model.sat_cap;
        let mut neighbors = NeighborVec::new();
        let mut new_sum = 0.0;
        let mut new_inf = 0u32;
        let mut sat_delta = 0.0;
        self.grid.for_neighbors(xi, range, None, |j, d| {
            let w = self.model.interaction.log_phi(d);
            if w == f64::NEG_INFINITY {
                new_inf += 1;
            } else {
                new_sum += w;
                let s = self.sums[j as usize];
                sat_delta += (s + w).min(k) - s.min(k);
            }
            neighbors.push((j, w));
        });
        sat_delta += new_sum.min(k);
        let delta = if new_inf > 0 || self.inf_pairs > 0 {
            f64::NEG_INFINITY
        } else {
            self.model.lambda.ln() + sat_delta
        };
        StagedBirth {
            point: xi,
            delta,
            new_sum,
            new_inf,
            sat_delta,
            neighbors,
            stamp: self.stamp,
        }
    }

    pub fn apply_birth(&mut self, staged: StagedBirth) {
        assert_eq!(
            staged.stamp, self.stamp,
            "staged update is stale: the cache was mutated after staging"
        );
        let idx = self.points.len() as u32;
        self.points.push(staged.point);
        self.sums.push(staged.new_sum);
        self.inf_counts.push(staged.new_inf);
        self.grid.insert(idx, staged.point);
        for &(j, w) in &staged.neighbors {
            if w == f64::NEG_INFINITY {
                self.inf_counts[j as usize] += 1;
                self.inf_pairs += 1;
            } else {
                self.sums[j as usize] += w;
            }
        }
        self.sat_total += staged.sat_delta;
        self.after_commit();
    }

    /// Stage the death of the point at `index`.
    ///
    /// The delta is the exact reverse of the birth of that point into the
    /// remaining pattern; `+inf` when removing it restores a finite density.
    pub fn delta_death(&self, index: u32) -> StagedDeath {
        let i = index as usize;
        assert!(i < self.points.len(), "death index out of range");
        let range = self.model.interaction.range();
        let k = self.model.sat_cap;
        let p = self.points[i];
        let mut neighbors = NeighborVec::new();
        let mut own_inf = 0u32;
        let mut sat_delta = -self.sums[i].min(k);
        self.grid.for_neighbors(p, range, Some(index), |j, d| {
            let w = self.model.interaction.log_phi(d);
            if w == f64::NEG_INFINITY {
                own_inf += 1;
            } else {
                let s = self.sums[j as usize];
                sat_delta += (s - w).min(k) - s.min(k);
            }
            neighbors.push((j, w));
        });
        debug_assert_eq!(own_inf, self.inf_counts[i]);
        let remaining_inf = self.inf_pairs - own_inf as usize;
        let delta = if remaining_inf > 0 {
            f64::NEG_INFINITY
        } else if self.inf_pairs > 0 {
            f64::INFINITY
        } else {
            -self.model.lambda.ln() + sat_delta
        };
        StagedDeath {
            index,
            delta,
            sat_delta,
            neighbors,
            stamp: self.stamp,
        }
    }

    pub fn apply_death(&mut self, staged: StagedDeath) {
        assert_eq!(
            staged.stamp, self.stamp,
            "staged update is stale: the cache was mutated after staging"
        );
        let i = staged.index as usize;
        for &(j, w) in &staged.neighbors {
            if w == f64::NEG_INFINITY {
                self.inf_counts[j as usize] -= 1;
                self.inf_pairs -= 1;
            } else {
                self.sums[j as usize] -= w;
            }
        }
        self.sat_total += staged.sat_delta;
        let last = self.points.len() - 1;
        self.grid.remove(staged.index, self.points[i]);
        if i != last {
            let moved = self.points[last];
            self.grid.remove(last as u32, moved);
            self.grid.insert(staged.index, moved);
        }
        self.points.swap_remove(i);
        self.sums.swap_remove(i);
        self.inf_counts.swap_remove(i);
        self.after_commit();
    }

    fn after_commit(&mut self) {
        self.commits += 1;
        self.stamp += 1;
        if self.commits.is_multiple_of(REFRESH_STRIDE) {
            self.refresh();
        }
    }
}
