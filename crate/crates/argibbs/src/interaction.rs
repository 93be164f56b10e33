//! Pairwise interaction functions.
//!
//! The attraction-repulsion interaction is piecewise: zero up to the hard
//! core `R`, a downward parabola `y1` rising from zero to a peak of height
//! `theta1` at distance `theta2`, and a decaying tail
//! `y2(r) = 1 + 1/(theta3 (r - r2))^2` beyond the knot `r1`. The knots
//! `(r1, r2)` are solved at construction so the two branches join with
//! matching value and slope. Past the truncation radius `r_max` the
//! interaction is exactly 1, so distant pairs drop out of the density.

use thiserror::Error;

#[derive(Clone, Debug, Error, PartialEq)]
pub enum KnotError {
    #[error("no C1 knot solution: peak height theta1 = {0} does not exceed 1")]
    NoKnotSolution(f64),
    #[error("knot solver failed to converge")]
    SolverFailure,
    #[error("invalid interaction parameter: {0}")]
    InvalidParameter(&'static str),
}

/// A stationary pairwise interaction `phi(r)`.
///
/// `log_phi` must be exactly 0 for `r > range()`, which is what lets the
/// samplers restrict likelihood updates to a bounded neighborhood.
pub trait Interaction {
    fn phi(&self, r: f64) -> f64;
    fn log_phi(&self, r: f64) -> f64;
    /// Distance beyond which `phi` is exactly 1.
    fn range(&self) -> f64;
}

/// Solve the C1 join conditions `y1(r1) = y2(r1)`, `y1'(r1) = y2'(r1)`.
///
/// With `a = theta1/(theta2 - R)^2`, `u = r1 - theta2` and `v = r1 - r2`
/// the system reduces to
///
/// ```text
/// v = (theta1 - 1 - a u^2) / (a u),      a u theta3^2 v^3 = 1
/// ```
///
/// and the residual `g(u) = a u theta3^2 v(u)^3 - 1` is strictly decreasing
/// on `(0, u_max)` with `u_max = (theta2 - R) sqrt((theta1 - 1)/theta1)`,
/// going from +inf to -1, so bisection on the bracket is robust.
pub fn solve_knots(
    theta1: f64,
    theta2: f64,
    theta3: f64,
    hard_core: f64,
) -> Result<(f64, f64), KnotError> {
    if !(theta1.is_finite() && theta2.is_finite() && theta3.is_finite() && hard_core.is_finite()) {
        return Err(KnotError::InvalidParameter("parameters must be finite"));
    }
    if hard_core < 0.0 {
        return Err(KnotError::InvalidParameter("hard core R must be >= 0"));
    }
    if theta2 <= hard_core {
        return Err(KnotError::InvalidParameter("theta2 must exceed R"));
    }
    if theta3 <= 0.0 {
        return Err(KnotError::InvalidParameter("theta3 must be > 0"));
    }
    if theta1 <= 1.0 {
        return Err(KnotError::NoKnotSolution(theta1));
    }

    let width = theta2 - hard_core;
    let a = theta1 / (width * width);
    let t3sq = theta3 * theta3;
    let v_of = |u: f64| (theta1 - 1.0 - a * u * u) / (a * u);
    let g = |u: f64| {
        let v = v_of(u);
        a * u * t3sq * v * v * v - 1.0
    };

    let u_max = width * ((theta1 - 1.0) / theta1).sqrt();
    // g(0+) = +inf by construction; treat lo = 0 as positive without evaluating.
    let mut lo = 0.0f64;
    let mut hi = u_max;
    let mut converged = false;
    for _ in 0..500 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            converged = true;
            break;
        }
        if g(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(KnotError::SolverFailure);
    }
    let u = 0.5 * (lo + hi);
    let v = v_of(u);
    if !(u > 0.0 && v > 0.0 && u.is_finite() && v.is_finite()) {
        return Err(KnotError::SolverFailure);
    }
    let r1 = theta2 + u;
    let r2 = r1 - v;

    // Sanity-check the original two equations.
    let y1 = theta1 - a * u * u;
    let tv = theta3 * v;
    let y2 = 1.0 + 1.0 / (tv * tv);
    let dy1 = -2.0 * a * u;
    let dy2 = -2.0 / (t3sq * v * v * v);
    let value_ok = (y1 - y2).abs() <= 1e-10 * y1.abs().max(1.0);
    let slope_ok = (dy1 - dy2).abs() <= 1e-10 * dy1.abs().max(dy2.abs()).max(1e-300);
    if !(value_ok && slope_ok) {
        return Err(KnotError::SolverFailure);
    }
    Ok((r1, r2))
}

/// The piecewise attraction-repulsion interaction with truncation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ArInteraction {
    theta1: f64,
    theta2: f64,
    theta3: f64,
    hard_core: f64,
    r_max: f64,
    r1: f64,
    r2: f64,
    quad_coeff: f64,
}

impl ArInteraction {
    pub fn new(
        theta1: f64,
        theta2: f64,
        theta3: f64,
        hard_core: f64,
        r_max: f64,
    ) -> Result<Self, KnotError> {
        if !(r_max.is_finite() && r_max > 0.0) {
            return Err(KnotError::InvalidParameter("r_max must be > 0"));
        }
        let (r1, r2) = solve_knots(theta1, theta2, theta3, hard_core)?;
        let width = theta2 - hard_core;
        Ok(ArInteraction {
            theta1,
            theta2,
            theta3,
            hard_core,
            r_max,
            r1,
            r2,
            quad_coeff: theta1 / (width * width),
        })
    }

    pub fn theta1(&self) -> f64 {
        self.theta1
    }

    pub fn theta2(&self) -> f64 {
        self.theta2
    }

    pub fn theta3(&self) -> f64 {
        self.theta3
    }

    pub fn hard_core(&self) -> f64 {
        self.hard_core
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Knot where the parabola hands over to the decaying tail.
    pub fn r1(&self) -> f64 {
        self.r1
    }

    /// Offset of the tail's asymptote.
    pub fn r2(&self) -> f64 {
        self.r2
    }
}

impl Interaction for ArInteraction {
    fn phi(&self, r: f64) -> f64 {
        if r > self.r_max {
            return 1.0;
        }
        if r <= self.hard_core {
            return 0.0;
        }
        if r <= self.r1 {
            let d = r - self.theta2;
            // y1(R) = 0 analytically; clamp shields against rounding just above R.
            (self.theta1 - self.quad_coeff * d * d).max(0.0)
        } else {
            let t = self.theta3 * (r - self.r2);
            1.0 + 1.0 / (t * t)
        }
    }

    fn log_phi(&self, r: f64) -> f64 {
        if r > self.r_max {
            return 0.0;
        }
        if r <= self.hard_core {
            return f64::NEG_INFINITY;
        }
        if r <= self.r1 {
            let d = r - self.theta2;
            let y = self.theta1 - self.quad_coeff * d * d;
            if y > 0.0 {
                y.ln()
            } else {
                f64::NEG_INFINITY
            }
        } else {
            let t = self.theta3 * (r - self.r2);
            (1.0 / (t * t)).ln_1p()
        }
    }

    fn range(&self) -> f64 {
        self.r_max
    }
}

/// Strauss interaction: `gamma` inside the interaction radius, 1 beyond.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StraussInteraction {
    gamma: f64,
    radius: f64,
}

impl StraussInteraction {
    pub fn new(gamma: f64, radius: f64) -> Result<Self, KnotError> {
        if !(0.0..=1.0).contains(&gamma) {
            return Err(KnotError::InvalidParameter("gamma must lie in [0, 1]"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(KnotError::InvalidParameter("radius must be > 0"));
        }
        Ok(StraussInteraction { gamma, radius })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }
}

impl Interaction for StraussInteraction {
    fn phi(&self, r: f64) -> f64 {
        if r <= self.radius {
            self.gamma
        } else {
            1.0
        }
    }

    fn log_phi(&self, r: f64) -> f64 {
        if r <= self.radius {
            self.gamma.ln()
        } else {
            0.0
        }
    }

    fn range(&self) -> f64 {
        self.radius
    }
}

/// Step interaction with unconstrained log-level: `exp(log_gamma)` inside
/// the radius, 1 beyond. `log_gamma = 0` reduces the model to a Poisson
/// process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StepInteraction {
    log_gamma: f64,
    radius: f64,
}

impl StepInteraction {
    pub fn new(log_gamma: f64, radius: f64) -> Result<Self, KnotError> {
        if !log_gamma.is_finite() {
            return Err(KnotError::InvalidParameter("log_gamma must be finite"));
        }
        if !(radius.is_finite() && radius > 0.0) {
            return Err(KnotError::InvalidParameter("radius must be > 0"));
        }
        Ok(StepInteraction { log_gamma, radius })
    }

    pub fn log_gamma(&self) -> f64 {
        self.log_gamma
    }
}

impl Interaction for StepInteraction {
    fn phi(&self, r: f64) -> f64 {
        if r <= self.radius {
            self.log_gamma.exp()
        } else {
            1.0
        }
    }

    fn log_phi(&self, r: f64) -> f64 {
        if r <= self.radius {
            self.log_gamma
        } else {
            0.0
        }
    }

    fn range(&self) -> f64 {
        self.radius
    }
}
