//! Double Metropolis-Hastings over model parameters.
//!
//! The likelihood's normalizing constant is intractable, so each outer step
//! draws an auxiliary pattern per data replicate by running the inner
//! birth-death chain at the proposed parameters, starting from the data.
//! The acceptance ratio then needs only unnormalized densities:
//!
//! ```text
//! alpha = min(1, prior-ratio * q-ratio *
//!             Π_i  h(X_i|Θ') h(Y_i|Θ) / ( h(X_i|Θ) h(Y_i|Θ') ))
//! ```
//!
//! Proposals are a Gaussian random walk on `(log λ, θ1, θ2, log θ3, k)`;
//! symmetry in the transformed coordinates leaves the Jacobian factor
//! `(λ'/λ)(θ3'/θ3)` in the ratio. More inner updates bring the auxiliary
//! draw closer to its target; the run cost is dominated by them.

use crate::bd::{run_chain, BdConfig};
use crate::geometry::{NeighborGrid, PointPattern};
use crate::interaction::{ArInteraction, Interaction, KnotError};
use crate::model::{log_h, CachedPattern, GibbsModel, ModelError, ReplicateSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Gamma};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DmhError {
    #[error(transparent)]
    Knot(#[from] KnotError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid sampler configuration: {0}")]
    BadConfig(&'static str),
    #[error("invalid prior: {0}")]
    BadPrior(&'static str),
    #[error("no replicate has two or more points")]
    TooFewPoints,
    #[error("initial parameters lie outside the prior support")]
    BadInit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UniformPrior {
    pub lo: f64,
    pub hi: f64,
}

impl UniformPrior {
    fn valid(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi
    }

    fn contains(&self, v: f64) -> bool {
        v >= self.lo && v <= self.hi
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GammaPrior {
    pub shape: f64,
    pub rate: f64,
}

impl GammaPrior {
    fn valid(&self) -> bool {
        self.shape > 0.0 && self.rate > 0.0 && self.shape.is_finite() && self.rate.is_finite()
    }

    fn log_density_unnorm(&self, v: f64) -> f64 {
        if v <= 0.0 {
            f64::NEG_INFINITY
        } else {
            (self.shape - 1.0) * v.ln() - self.rate * v
        }
    }
}

/// Priors: uniform over plausible ranges for `(λ, θ1, θ2, θ3)` and a gamma
/// prior for the saturation cap `k`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PriorSpec {
    pub lambda: UniformPrior,
    pub theta1: UniformPrior,
    pub theta2: UniformPrior,
    pub theta3: UniformPrior,
    pub k: GammaPrior,
}

impl PriorSpec {
    /// Defaults wide enough to bracket any plausible fit: λ per px²,
    /// peak heights up to 5, peak locations up to 50 px.
    pub fn defaults(hard_core: f64) -> Self {
        PriorSpec {
            lambda: UniformPrior { lo: 1e-5, hi: 5e-3 },
            theta1: UniformPrior { lo: 1.001, hi: 5.0 },
            theta2: UniformPrior {
                lo: hard_core + 0.5,
                hi: 50.0,
            },
            theta3: UniformPrior { lo: 0.01, hi: 2.0 },
            k: GammaPrior {
                shape: 2.0,
                rate: 1.0,
            },
        }
    }

    pub fn validate(&self, hard_core: f64) -> Result<(), DmhError> {
        if !(self.lambda.valid() && self.lambda.lo > 0.0) {
            return Err(DmhError::BadPrior("lambda range must satisfy 0 < lo < hi"));
        }
        if !(self.theta1.valid() && self.theta1.lo > 1.0) {
            return Err(DmhError::BadPrior("theta1 range must satisfy 1 < lo < hi"));
        }
        if !(self.theta2.valid() && self.theta2.lo > hard_core) {
            return Err(DmhError::BadPrior("theta2 range must satisfy R < lo < hi"));
        }
        if !(self.theta3.valid() && self.theta3.lo > 0.0) {
            return Err(DmhError::BadPrior("theta3 range must satisfy 0 < lo < hi"));
        }
        if !self.k.valid() {
            return Err(DmhError::BadPrior("gamma prior needs shape, rate > 0"));
        }
        Ok(())
    }

    pub fn contains(&self, p: &ArParams) -> bool {
        self.lambda.contains(p.lambda)
            && self.theta1.contains(p.theta1)
            && self.theta2.contains(p.theta2)
            && self.theta3.contains(p.theta3)
            && p.k > 0.0
    }

    /// Log prior density up to a constant; `-inf` outside the support.
    pub fn log_density(&self, p: &ArParams) -> f64 {
        if !self.contains(p) {
            return f64::NEG_INFINITY;
        }
        self.k.log_density_unnorm(p.k)
    }
}

/// Random-walk step sizes in the transformed coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProposalSd {
    pub log_lambda: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub log_theta3: f64,
    pub k: f64,
}

impl ProposalSd {
    /// 2% of each parameter's prior range (log-range for the log-scale
    /// coordinates; a central 99% interval for the gamma prior on k).
    pub fn default_for(prior: &PriorSpec) -> Self {
        let gamma = Gamma::new(prior.k.shape, prior.k.rate).expect("validated gamma prior");
        let k_range = gamma.inverse_cdf(0.995) - gamma.inverse_cdf(0.005);
        ProposalSd {
            log_lambda: 0.02 * (prior.lambda.hi.ln() - prior.lambda.lo.ln()),
            theta1: 0.02 * (prior.theta1.hi - prior.theta1.lo),
            theta2: 0.02 * (prior.theta2.hi - prior.theta2.lo),
            log_theta3: 0.02 * (prior.theta3.hi.ln() - prior.theta3.lo.ln()),
            k: 0.02 * k_range,
        }
    }

    fn all_positive(&self) -> bool {
        self.components().iter().all(|s| s.is_finite() && *s > 0.0)
    }

    fn all_non_negative(&self) -> bool {
        self.components().iter().all(|s| s.is_finite() && *s >= 0.0)
    }

    fn components(&self) -> [f64; 5] {
        [
            self.log_lambda,
            self.theta1,
            self.theta2,
            self.log_theta3,
            self.k,
        ]
    }
}

/// The model's parameter vector `(λ, θ1, θ2, θ3, k)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ArParams {
    pub lambda: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
    pub k: f64,
}

impl ArParams {
    /// Solve the knots and assemble the full model with the fixed
    /// structural constants.
    pub fn build(
        &self,
        hard_core: f64,
        r_max: f64,
    ) -> Result<GibbsModel<ArInteraction>, DmhError> {
        let f = ArInteraction::new(self.theta1, self.theta2, self.theta3, hard_core, r_max)?;
        Ok(GibbsModel::new(self.lambda, self.k, f)?)
    }
}

/// A proposed parameter move: the candidate, the log proposal-density
/// correction `log q(cand -> cur) - log q(cur -> cand)`, and whether the
/// candidate is inside the support (flagged candidates are auto-rejected
/// without running the inner chains).
#[derive(Clone, Debug)]
pub struct Proposal<P> {
    pub candidate: P,
    pub log_q_ratio: f64,
    pub in_support: bool,
}

/// The pieces of the outer sampler a parameter family must provide.
pub trait DmhModel: Sync {
    type I: Interaction + Clone + Send + Sync;
    type Params: Clone + Send + Sync;

    fn propose<R: Rng + ?Sized>(
        &self,
        current: &Self::Params,
        scale: f64,
        rng: &mut R,
    ) -> Proposal<Self::Params>;

    /// Log prior density up to a constant; `-inf` outside the support.
    fn log_prior(&self, p: &Self::Params) -> f64;

    fn build(&self, p: &Self::Params) -> Result<GibbsModel<Self::I>, KnotError>;
}

/// The attraction-repulsion parameter family with its priors and fixed
/// structural constants.
#[derive(Clone, Debug)]
pub struct ArDmhSpec {
    pub prior: PriorSpec,
    pub hard_core: f64,
    pub r_max: f64,
    pub sd: ProposalSd,
}

impl ArDmhSpec {
    pub fn new(
        prior: PriorSpec,
        hard_core: f64,
        r_max: f64,
        sd: Option<ProposalSd>,
    ) -> Result<Self, DmhError> {
        prior.validate(hard_core)?;
        if !(hard_core >= 0.0 && hard_core.is_finite()) {
            return Err(DmhError::BadConfig("hard core R must be >= 0"));
        }
        if !(r_max > 0.0 && r_max.is_finite()) {
            return Err(DmhError::BadConfig("r_max must be > 0"));
        }
        // Zero steps give a degenerate but well-defined identity proposal;
        // run configs reject them separately.
        let sd = sd.unwrap_or_else(|| ProposalSd::default_for(&prior));
        if !sd.all_non_negative() {
            return Err(DmhError::BadConfig("proposal step sizes must be >= 0"));
        }
        Ok(ArDmhSpec {
            prior,
            hard_core,
            r_max,
            sd,
        })
    }

    /// Heuristic chain start: prior midpoints (log-midpoints for the
    /// scale-like coordinates, the prior mean for k).
    pub fn default_init(&self) -> ArParams {
        ArParams {
            lambda: (0.5 * (self.prior.lambda.lo.ln() + self.prior.lambda.hi.ln())).exp(),
            theta1: 0.5 * (self.prior.theta1.lo + self.prior.theta1.hi),
            theta2: 0.5 * (self.prior.theta2.lo + self.prior.theta2.hi),
            theta3: (0.5 * (self.prior.theta3.lo.ln() + self.prior.theta3.hi.ln())).exp(),
            k: self.prior.k.shape / self.prior.k.rate,
        }
    }

    /// Data-driven chain start: the empirical pair-correlation peak fixes
    /// the starting peak location and height, and the observed count rate
    /// fixes the starting intensity. Starting near the data's own structure
    /// keeps the walk out of distant saturated ridges the random-walk
    /// proposals escape only slowly.
    pub fn init_from_data(&self, data: &ReplicateSet) -> ArParams {
        let mut init = self.default_init();
        let margin = |p: &UniformPrior| 0.02 * (p.hi - p.lo);
        let clamp = |v: f64, p: &UniformPrior| v.clamp(p.lo + margin(p), p.hi - margin(p));

        let area = data.window().area();
        init.lambda = clamp(data.mean_points() / area, &self.prior.lambda);

        let delta = crate::summaries::default_bandwidth(data);
        // Search above the kernel's bias-prone zone (r < 2 delta), where the
        // hard-core gap otherwise masquerades as a spurious peak.
        let lo = (self.prior.theta2.lo).max(2.0 * delta);
        let hi = self.prior.theta2.hi;
        if let Ok(grid) = crate::summaries::RadiusGrid::linspace(lo, hi, 64) {
            if let Ok(g) = crate::summaries::empirical_pcf(data, &grid, delta) {
                let mut best = 0usize;
                for (i, v) in g.iter().enumerate() {
                    if *v > g[best] {
                        best = i;
                    }
                }
                init.theta2 = clamp(grid.values()[best], &self.prior.theta2);
                init.theta1 = clamp(g[best], &self.prior.theta1);
                init.theta3 = clamp(2.0 / init.theta2, &self.prior.theta3);
            }
        }
        init
    }
}

/// Perturb a coordinate; a zero step leaves it untouched exactly.
fn walk<R: Rng + ?Sized>(value: f64, step: f64, rng: &mut R) -> f64 {
    if step == 0.0 {
        value
    } else {
        value + step * rng.sample::<f64, _>(StandardNormal)
    }
}

fn walk_log<R: Rng + ?Sized>(value: f64, step: f64, rng: &mut R) -> f64 {
    if step == 0.0 {
        value
    } else {
        (value.ln() + step * rng.sample::<f64, _>(StandardNormal)).exp()
    }
}

impl DmhModel for ArDmhSpec {
    type I = ArInteraction;
    type Params = ArParams;

    fn propose<R: Rng + ?Sized>(
        &self,
        current: &ArParams,
        scale: f64,
        rng: &mut R,
    ) -> Proposal<ArParams> {
        let candidate = ArParams {
            lambda: walk_log(current.lambda, scale * self.sd.log_lambda, rng),
            theta1: walk(current.theta1, scale * self.sd.theta1, rng),
            theta2: walk(current.theta2, scale * self.sd.theta2, rng),
            theta3: walk_log(current.theta3, scale * self.sd.log_theta3, rng),
            k: walk(current.k, scale * self.sd.k, rng),
        };
        // Jacobian of the log-scale walk on lambda and theta3.
        let log_q_ratio = candidate.lambda.ln() - current.lambda.ln() + candidate.theta3.ln()
            - current.theta3.ln();
        let in_support = self.prior.contains(&candidate)
            && candidate.theta1 > 1.0 + 1e-6
            && candidate.theta2 > self.hard_core;
        Proposal {
            candidate,
            log_q_ratio,
            in_support,
        }
    }

    fn log_prior(&self, p: &ArParams) -> f64 {
        self.prior.log_density(p)
    }

    fn build(&self, p: &ArParams) -> Result<GibbsModel<ArInteraction>, KnotError> {
        let f = ArInteraction::new(p.theta1, p.theta2, p.theta3, self.hard_core, self.r_max)?;
        GibbsModel::new(p.lambda, p.k, f)
            .map_err(|_| KnotError::InvalidParameter("lambda or k out of range"))
    }
}

/// Outer sampler configuration.
#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct DmhConfig {
    /// Retained outer steps (after the adaptation phase).
    pub n_outer: u64,
    /// Inner birth-death updates per auxiliary draw; 0 = auto
    /// (`max(10_000, 3 * mean replicate size)`).
    pub m_inner: u64,
    /// Keep every `thin`-th outer state.
    pub thin: u64,
    /// Pilot steps during which the proposal scale adapts multiplicatively;
    /// the scale is frozen afterwards and the pilot states are discarded.
    pub n_adapt: u64,
    pub proposal_sd: Option<ProposalSd>,
    pub rng_seed: u64,
    /// Optional cap forwarded to the inner birth-death chains (truncates
    /// the auxiliary state space to `n <= cap`).
    pub inner_max_points: Option<usize>,
}

impl DmhConfig {
    pub fn new(n_outer: u64, rng_seed: u64) -> Self {
        DmhConfig {
            n_outer,
            m_inner: 0,
            thin: 10,
            n_adapt: 2_000,
            proposal_sd: None,
            rng_seed,
            inner_max_points: None,
        }
    }

    fn validate(&self) -> Result<(), DmhError> {
        if self.thin == 0 {
            return Err(DmhError::BadConfig("thin must be >= 1"));
        }
        if let Some(sd) = &self.proposal_sd {
            if !sd.all_positive() {
                return Err(DmhError::BadConfig(
                    "proposal step sizes must be > 0 componentwise",
                ));
            }
        }
        Ok(())
    }

    fn resolved_m_inner(&self, data: &ReplicateSet) -> u64 {
        if self.m_inner > 0 {
            self.m_inner
        } else {
            10_000u64.max((3.0 * data.mean_points()).ceil() as u64)
        }
    }
}

/// Ordered posterior samples with acceptance bookkeeping.
#[derive(Clone, Debug)]
pub struct DmhChain<P> {
    /// Retained states, one every `thin` post-adaptation steps.
    pub samples: Vec<P>,
    /// Whether the step that produced each retained state was an acceptance.
    pub accepted: Vec<bool>,
    /// Accepted moves over all post-adaptation steps.
    pub accept_count: u64,
    /// Post-adaptation steps executed.
    pub n_steps: u64,
    /// Auxiliary pattern sizes per post-adaptation step and replicate
    /// (empty rows for steps rejected before the inner chains ran).
    pub aux_counts: Vec<Vec<u32>>,
    /// Frozen proposal scale after adaptation.
    pub step_scale: f64,
}

pub type PosteriorChain = DmhChain<ArParams>;

impl<P> DmhChain<P> {
    pub fn accept_rate(&self) -> f64 {
        if self.n_steps == 0 {
            0.0
        } else {
            self.accept_count as f64 / self.n_steps as f64
        }
    }
}

/// Per-replicate log-density evaluations entering the acceptance ratio.
#[derive(Clone, Copy, Debug)]
pub struct ReplicateTerms {
    /// `log h(X_i | Θ')`
    pub data_cand: f64,
    /// `log h(X_i | Θ)`
    pub data_cur: f64,
    /// `log h(Y_i | Θ)`
    pub aux_cur: f64,
    /// `log h(Y_i | Θ')`
    pub aux_cand: f64,
}

/// Log acceptance ratio of the replicate-aware exchange step. Any `-inf`
/// numerator term forces rejection.
pub fn log_acceptance(log_prior_ratio: f64, log_q_ratio: f64, terms: &[ReplicateTerms]) -> f64 {
    let mut total = log_prior_ratio + log_q_ratio;
    for t in terms {
        if t.data_cand == f64::NEG_INFINITY || t.aux_cur == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        debug_assert!(t.data_cur > f64::NEG_INFINITY && t.aux_cand > f64::NEG_INFINITY);
        total += t.data_cand - t.data_cur + t.aux_cur - t.aux_cand;
    }
    total
}

/// Current position of the outer chain plus cached evaluations at it.
pub struct DmhState<M: DmhModel> {
    pub params: M::Params,
    model: GibbsModel<M::I>,
    log_prior: f64,
    data_log_h: Vec<f64>,
}

impl<M: DmhModel> DmhState<M> {
    pub fn new(spec: &M, params: M::Params, data: &ReplicateSet) -> Result<Self, DmhError> {
        let log_prior = spec.log_prior(&params);
        if log_prior == f64::NEG_INFINITY {
            return Err(DmhError::BadInit);
        }
        let model = spec.build(&params)?;
        let mut data_log_h = Vec::with_capacity(data.len());
        for (replicate, pat) in data.patterns().iter().enumerate() {
            let v = log_h(pat, &model);
            if v == f64::NEG_INFINITY {
                // Pin down one offending pair for the error.
                let pts = pat.points();
                for i in 0..pts.len() {
                    for j in (i + 1)..pts.len() {
                        let d = pts[i].dist(pts[j]);
                        if model.interaction.log_phi(d) == f64::NEG_INFINITY {
                            return Err(DmhError::Model(ModelError::HardCoreViolation {
                                replicate,
                                i,
                                j,
                                distance: d,
                            }));
                        }
                    }
                }
            }
            data_log_h.push(v);
        }
        Ok(DmhState {
            params,
            model,
            log_prior,
            data_log_h,
        })
    }
}

/// Streams 1.. are reserved for inner chains; stream 0 drives the outer walk.
fn inner_stream(step: u64, n_reps: u64, rep: u64) -> u64 {
    1 + step * n_reps + rep
}

/// One outer DMH step. Returns whether the proposal was accepted plus the
/// auxiliary pattern sizes (empty when rejected before the inner chains).
#[allow(clippy::too_many_arguments)]
pub fn dmh_step<M: DmhModel, R: Rng + ?Sized>(
    spec: &M,
    state: &mut DmhState<M>,
    data: &ReplicateSet,
    inner: &BdConfig,
    scale: f64,
    seed: u64,
    step_index: u64,
    rng: &mut R,
) -> (bool, Vec<u32>) {
    let proposal = spec.propose(&state.params, scale, rng);
    // Draw the acceptance uniform unconditionally to keep the outer stream
    // aligned regardless of early rejection.
    let u: f64 = rng.random();
    if !proposal.in_support {
        return (false, Vec::new());
    }
    let log_prior_cand = spec.log_prior(&proposal.candidate);
    if log_prior_cand == f64::NEG_INFINITY {
        return (false, Vec::new());
    }
    let cand_model = match spec.build(&proposal.candidate) {
        Ok(m) => m,
        Err(err) => {
            log::warn!("rejecting candidate with unsolvable interaction: {err}");
            return (false, Vec::new());
        }
    };

    let n_reps = data.len() as u64;
    let evals: Vec<(ReplicateTerms, u32)> = data
        .patterns()
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let mut inner_rng = ChaCha8Rng::seed_from_u64(seed);
            inner_rng.set_stream(inner_stream(step_index, n_reps, i as u64));
            let data_cand = log_h(x, &cand_model);
            // The auxiliary chain starts at the data pattern.
            let mut cache = CachedPattern::new(x, cand_model.clone());
            run_chain(&mut cache, inner.n_steps, inner, &mut inner_rng);
            let y = cache.into_pattern();
            let aux_cur = log_h(&y, &state.model);
            let aux_cand = log_h(&y, &cand_model);
            (
                ReplicateTerms {
                    data_cand,
                    data_cur: state.data_log_h[i],
                    aux_cur,
                    aux_cand,
                },
                y.len() as u32,
            )
        })
        .collect();

    let terms: Vec<ReplicateTerms> = evals.iter().map(|(t, _)| *t).collect();
    let aux_sizes: Vec<u32> = evals.iter().map(|(_, n)| *n).collect();
    let log_alpha = log_acceptance(
        log_prior_cand - state.log_prior,
        proposal.log_q_ratio,
        &terms,
    );
    let accepted = u.ln() <= log_alpha;
    if accepted {
        state.params = proposal.candidate;
        state.model = cand_model;
        state.log_prior = log_prior_cand;
        state.data_log_h = terms.iter().map(|t| t.data_cand).collect();
    }
    (accepted, aux_sizes)
}

const ADAPT_WINDOW: u64 = 100;

/// Run the outer chain: an adaptation pilot of `cfg.n_adapt` steps (whose
/// states are discarded), then `cfg.n_outer` steps retained every
/// `cfg.thin`. Deterministic in `cfg.rng_seed` regardless of how the inner
/// chains are scheduled.
pub fn dmh_run<M: DmhModel>(
    spec: &M,
    data: &ReplicateSet,
    init: M::Params,
    cfg: &DmhConfig,
) -> Result<DmhChain<M::Params>, DmhError> {
    cfg.validate()?;
    let inner = BdConfig {
        p_birth: 0.5,
        n_steps: cfg.resolved_m_inner(data),
        rng_seed: 0,
        max_points: cfg.inner_max_points,
    };
    let mut state = DmhState::new(spec, init, data)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.rng_seed);
    rng.set_stream(0);

    let mut scale = 1.0f64;
    let mut window_accepts = 0u64;
    for t in 0..cfg.n_adapt {
        let (accepted, _) =
            dmh_step(spec, &mut state, data, &inner, scale, cfg.rng_seed, t, &mut rng);
        if accepted {
            window_accepts += 1;
        }
        if (t + 1) % ADAPT_WINDOW == 0 {
            let rate = window_accepts as f64 / ADAPT_WINDOW as f64;
            if rate < 0.2 {
                scale *= 0.8;
            } else if rate > 0.4 {
                scale *= 1.25;
            }
            scale = scale.clamp(1e-3, 1e3);
            window_accepts = 0;
        }
    }

    let expected = (cfg.n_outer / cfg.thin) as usize;
    let mut chain = DmhChain {
        samples: Vec::with_capacity(expected),
        accepted: Vec::with_capacity(expected),
        accept_count: 0,
        n_steps: cfg.n_outer,
        aux_counts: Vec::with_capacity(cfg.n_outer as usize),
        step_scale: scale,
    };
    for t in 0..cfg.n_outer {
        let step_index = cfg.n_adapt + t;
        let (accepted, aux) = dmh_step(
            spec,
            &mut state,
            data,
            &inner,
            scale,
            cfg.rng_seed,
            step_index,
            &mut rng,
        );
        if accepted {
            chain.accept_count += 1;
        }
        chain.aux_counts.push(aux);
        if (t + 1) % cfg.thin == 0 {
            chain.samples.push(state.params.clone());
            chain.accepted.push(accepted);
        }
    }
    Ok(chain)
}

/// Fit the attraction-repulsion model to replicate data with fixed
/// structural constants `(R, r_max)`.
pub fn fit_attraction_repulsion(
    data: &ReplicateSet,
    prior: &PriorSpec,
    cfg: &DmhConfig,
    hard_core: f64,
    r_max: f64,
) -> Result<PosteriorChain, DmhError> {
    let spec = ArDmhSpec::new(*prior, hard_core, r_max, cfg.proposal_sd)?;
    let init = spec.init_from_data(data);
    dmh_run(&spec, data, init, cfg)
}

/// The hard-core radius fixed from data: the minimum pairwise distance over
/// all replicates, shrunk by a relative 1e-9 so the data itself keeps a
/// finite likelihood.
pub fn fix_hardcore_radius(data: &ReplicateSet) -> Result<f64, DmhError> {
    let mut best = f64::INFINITY;
    for pat in data.patterns() {
        if let Some(d) = grid_min_distance(pat) {
            best = best.min(d);
        }
    }
    if !best.is_finite() {
        return Err(DmhError::TooFewPoints);
    }
    Ok(best * (1.0 - 1e-9))
}

/// Grid-assisted minimum pairwise distance: query with a doubling radius
/// until some pair is found.
fn grid_min_distance(pattern: &PointPattern) -> Option<f64> {
    let n = pattern.len();
    if n < 2 {
        return None;
    }
    let (lo, hi) = pattern.window().bounding_box();
    let span = (hi.x - lo.x).max(hi.y - lo.y);
    let mut radius = (span / (n as f64).sqrt()).max(span * 1e-9);
    loop {
        let grid = NeighborGrid::from_points(pattern.window(), radius, pattern.points());
        let mut best = f64::INFINITY;
        for (i, p) in pattern.points().iter().enumerate() {
            grid.for_neighbors(*p, radius, Some(i as u32), |_, d| {
                if d < best {
                    best = d;
                }
            });
        }
        if best.is_finite() {
            return Some(best);
        }
        if radius >= span {
            // No pair within the whole span: fall back to the direct scan.
            return pattern.min_pairwise_distance();
        }
        radius = (radius * 2.0).min(span);
    }
}
