//! Observation windows, point primitives, uniform sampling, and the
//! fixed-radius neighbor grid.
//!
//! Distances are Euclidean in pixel units throughout. All radius queries
//! use the closed-ball convention (`d <= r`), matching the hard-core
//! indicator of the model density.

mod grid;

pub use grid::NeighborGrid;

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("invalid window: {0}")]
    InvalidWindow(&'static str),
    #[error("point ({x}, {y}) has non-finite coordinates")]
    NonFinitePoint { x: f64, y: f64 },
    #[error("point {index} at ({x}, {y}) lies outside the observation window")]
    PointOutsideWindow { index: usize, x: f64, y: f64 },
}

/// A planar location in pixel coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn dist2(self, other: Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }

    pub fn dist(self, other: Point) -> f64 {
        self.dist2(other).sqrt()
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

/// A bounded planar observation window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Window {
    Disc {
        center: Point,
        radius: f64,
    },
    Rect {
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
    },
}

impl Window {
    pub fn disc(center: Point, radius: f64) -> Result<Self, GeometryError> {
        if !center.is_finite() || !radius.is_finite() {
            return Err(GeometryError::InvalidWindow("disc must be finite"));
        }
        if radius <= 0.0 {
            return Err(GeometryError::InvalidWindow("disc radius must be > 0"));
        }
        Ok(Window::Disc { center, radius })
    }

    pub fn rect(x_min: f64, y_min: f64, x_max: f64, y_max: f64) -> Result<Self, GeometryError> {
        if ![x_min, y_min, x_max, y_max].iter().all(|v| v.is_finite()) {
            return Err(GeometryError::InvalidWindow("rect bounds must be finite"));
        }
        if x_min >= x_max || y_min >= y_max {
            return Err(GeometryError::InvalidWindow(
                "rect must satisfy x_min < x_max and y_min < y_max",
            ));
        }
        Ok(Window::Rect {
            x_min,
            y_min,
            x_max,
            y_max,
        })
    }

    pub fn area(&self) -> f64 {
        match *self {
            Window::Disc { radius, .. } => std::f64::consts::PI * radius * radius,
            Window::Rect {
                x_min,
                y_min,
                x_max,
                y_max,
            } => (x_max - x_min) * (y_max - y_min),
        }
    }

    /// Membership test; the boundary counts as inside.
    pub fn contains(&self, p: Point) -> bool {
        match *self {
            Window::Disc { center, radius } => p.dist2(center) <= radius * radius,
            Window::Rect {
                x_min,
                y_min,
                x_max,
                y_max,
            } => p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max,
        }
    }

    /// Axis-aligned bounding box as (lower-left, upper-right).
    pub fn bounding_box(&self) -> (Point, Point) {
        match *self {
            Window::Disc { center, radius } => (
                Point::new(center.x - radius, center.y - radius),
                Point::new(center.x + radius, center.y + radius),
            ),
            Window::Rect {
                x_min,
                y_min,
                x_max,
                y_max,
            } => (Point::new(x_min, y_min), Point::new(x_max, y_max)),
        }
    }

    /// Draw a point uniformly over the window.
    ///
    /// Discs use rejection from the bounding square, so the distribution is
    /// exactly uniform.
    pub fn sample_uniform<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        match *self {
            Window::Rect {
                x_min,
                y_min,
                x_max,
                y_max,
            } => {
                let x = x_min + rng.random::<f64>() * (x_max - x_min);
                let y = y_min + rng.random::<f64>() * (y_max - y_min);
                Point::new(x, y)
            }
            Window::Disc { center, radius } => loop {
                let x = (2.0 * rng.random::<f64>() - 1.0) * radius;
                let y = (2.0 * rng.random::<f64>() - 1.0) * radius;
                if x * x + y * y <= radius * radius {
                    return Point::new(center.x + x, center.y + y);
                }
            },
        }
    }
}

/// A finite point configuration together with the window it was observed in.
///
/// Construction validates that every point is finite and inside the window.
#[derive(Clone, Debug, PartialEq)]
pub struct PointPattern {
    window: Window,
    points: Vec<Point>,
}

impl PointPattern {
    pub fn new(window: Window, points: Vec<Point>) -> Result<Self, GeometryError> {
        for (index, p) in points.iter().enumerate() {
            if !p.is_finite() {
                return Err(GeometryError::NonFinitePoint { x: p.x, y: p.y });
            }
            if !window.contains(*p) {
                return Err(GeometryError::PointOutsideWindow {
                    index,
                    x: p.x,
                    y: p.y,
                });
            }
        }
        Ok(PointPattern { window, points })
    }

    pub fn empty(window: Window) -> Self {
        PointPattern {
            window,
            points: Vec::new(),
        }
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Minimum pairwise distance, or `None` when fewer than two points.
    pub fn min_pairwise_distance(&self) -> Option<f64> {
        if self.points.len() < 2 {
            return None;
        }
        let mut best = f64::INFINITY;
        for i in 0..self.points.len() {
            for j in (i + 1)..self.points.len() {
                best = best.min(self.points[i].dist(self.points[j]));
            }
        }
        Some(best)
    }
}
