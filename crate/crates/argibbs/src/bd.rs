//! Birth-death Metropolis-Hastings chain over point configurations.
//!
//! Each step proposes, with probability `p_birth`, the birth of a point
//! drawn uniformly over the window (proposal density `1/A`), and otherwise
//! the death of a point chosen uniformly among the current ones (`1/n`).
//! The acceptance ratios are
//!
//! ```text
//! birth:  min(1, (p2/p1) exp(Δ_birth) A / (n + 1))
//! death:  min(1, (p1/p2) exp(Δ_death) n / A)
//! ```
//!
//! so the chain targets the density proportional to `h(· | Θ)` with respect
//! to the unit-rate Poisson process on the window. With the interaction
//! forced to 1 the stationary point count is Poisson(λA).

use crate::geometry::PointPattern;
use crate::interaction::Interaction;
use crate::model::{CachedPattern, GibbsModel, ModelError};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct BdConfig {
    /// Probability of proposing a birth; deaths get the complement.
    pub p_birth: f64,
    /// Steps to run.
    pub n_steps: u64,
    pub rng_seed: u64,
    /// Optional cap on the point count; births beyond it are auto-rejected,
    /// truncating the target to `n <= max_points`.
    pub max_points: Option<usize>,
}

impl BdConfig {
    pub fn new(n_steps: u64, rng_seed: u64) -> Self {
        BdConfig {
            p_birth: 0.5,
            n_steps,
            rng_seed,
            max_points: None,
        }
    }

    fn validate(&self) -> Result<(), ModelError> {
        if !(self.p_birth > 0.0 && self.p_birth < 1.0) {
            return Err(ModelError::InvalidParameter(
                "p_birth must lie strictly between 0 and 1",
            ));
        }
        Ok(())
    }
}

fn accept<R: Rng + ?Sized>(rng: &mut R, log_ratio: f64) -> bool {
    if log_ratio >= 0.0 {
        return true;
    }
    if log_ratio == f64::NEG_INFINITY {
        return false;
    }
    rng.random::<f64>().ln() <= log_ratio
}

/// Execute one birth-death proposal in place. Returns whether it was
/// accepted; rejected moves (including deaths proposed on an empty pattern
/// and births beyond `max_points`) leave the state unchanged.
pub fn bd_step<I: Interaction + Clone, R: Rng + ?Sized>(
    cache: &mut CachedPattern<I>,
    cfg: &BdConfig,
    rng: &mut R,
) -> bool {
    let area = cache.window().area();
    let p1 = cfg.p_birth;
    let p2 = 1.0 - cfg.p_birth;
    if rng.random::<f64>() < p1 {
        if let Some(cap) = cfg.max_points {
            if cache.len() >= cap {
                return false;
            }
        }
        let xi = cache.window().sample_uniform(rng);
        let staged = cache.delta_birth(xi);
        let n_after = (cache.len() + 1) as f64;
        let log_ratio = (p2 / p1).ln() + staged.delta() + (area / n_after).ln();
        if accept(rng, log_ratio) {
            cache.apply_birth(staged);
            true
        } else {
            false
        }
    } else {
        if cache.is_empty() {
            return false;
        }
        let idx = rng.random_range(0..cache.len()) as u32;
        let staged = cache.delta_death(idx);
        let n = cache.len() as f64;
        let log_ratio = (p1 / p2).ln() + staged.delta() + (n / area).ln();
        if accept(rng, log_ratio) {
            cache.apply_death(staged);
            true
        } else {
            false
        }
    }
}

/// Run `n_steps` proposals on `cache` with the supplied generator.
/// Returns the number of accepted moves.
pub fn run_chain<I: Interaction + Clone, R: Rng + ?Sized>(
    cache: &mut CachedPattern<I>,
    n_steps: u64,
    cfg: &BdConfig,
    rng: &mut R,
) -> u64 {
    let mut accepted = 0;
    for _ in 0..n_steps {
        if bd_step(cache, cfg, rng) {
            accepted += 1;
        }
    }
    accepted
}

/// Run the chain from `init` for `cfg.n_steps` steps and return the final
/// pattern. The initial pattern must have positive density (no hard-core
/// violations) so the acceptance ratios are well defined.
pub fn bd_run<I: Interaction + Clone>(
    init: &PointPattern,
    model: GibbsModel<I>,
    cfg: &BdConfig,
) -> Result<PointPattern, ModelError> {
    cfg.validate()?;
    let mut cache = init_cache(init, model)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    run_chain(&mut cache, cfg.n_steps, cfg, &mut rng);
    Ok(cache.into_pattern())
}

/// Draw `n_samples` patterns from the chain started at the empty pattern:
/// `cfg.n_steps` burn-in steps, then one pattern every `thin` steps.
pub fn bd_sample_patterns<I: Interaction + Clone>(
    window: &crate::geometry::Window,
    model: GibbsModel<I>,
    cfg: &BdConfig,
    n_samples: usize,
    thin: u64,
) -> Result<Vec<PointPattern>, ModelError> {
    cfg.validate()?;
    let mut cache = CachedPattern::new(&PointPattern::empty(*window), model);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    let mut out = Vec::with_capacity(n_samples);
    run_chain(&mut cache, cfg.n_steps, cfg, &mut rng);
    for i in 0..n_samples {
        if i > 0 {
            run_chain(&mut cache, thin, cfg, &mut rng);
        }
        out.push(cache.to_pattern());
    }
    Ok(out)
}

pub(crate) fn init_cache<I: Interaction + Clone>(
    init: &PointPattern,
    model: GibbsModel<I>,
) -> Result<CachedPattern<I>, ModelError> {
    let cache = CachedPattern::new(init, model);
    if cache.hard_core_pairs() > 0 {
        // Locate one offending pair for the error message.
        let pts = init.points();
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let d = pts[i].dist(pts[j]);
                if cache.model().interaction.log_phi(d) == f64::NEG_INFINITY {
                    return Err(ModelError::HardCoreViolation {
                        replicate: 0,
                        i,
                        j,
                        distance: d,
                    });
                }
            }
        }
    }
    Ok(cache)
}
