//! Attraction-repulsion Gibbs spatial point processes.
//!
//! This crate provides the pieces needed to simulate and fit Gibbs point
//! process models whose pairwise interaction switches from repulsion at
//! short range to attraction at intermediate range:
//!
//! * [`geometry`] — observation windows, uniform sampling, and a
//!   fixed-radius neighbor grid for fast local queries;
//! * [`interaction`] — the piecewise attraction-repulsion interaction
//!   function with its C¹ knot solver, plus Strauss and step baselines;
//! * [`model`] — the unnormalized saturated density `h(X | Θ)` and an
//!   incrementally updatable cached form for single-point moves;
//! * [`bd`] — the birth-death Metropolis-Hastings chain over point
//!   configurations (forward simulator and inner sampler);
//! * [`dmh`] — the outer double Metropolis-Hastings sampler over model
//!   parameters for the doubly intractable posterior;
//! * [`summaries`] — Ripley's K, the local (LISA) pair correlation
//!   estimator, and bootstrap confidence bands;
//! * [`posterior`] — HPD intervals, batch-means Monte Carlo standard
//!   errors, and posterior-predictive PCF bands.

pub mod bd;
pub mod dmh;
pub mod geometry;
pub mod interaction;
pub mod model;
pub mod posterior;
pub mod summaries;

pub use bd::{bd_run, bd_sample_patterns, bd_step, BdConfig};
pub use dmh::{
    dmh_run, fit_attraction_repulsion, fix_hardcore_radius, ArDmhSpec, ArParams, DmhChain,
    DmhConfig, DmhError, DmhModel, GammaPrior, PosteriorChain, PriorSpec, Proposal, ProposalSd,
    UniformPrior,
};
pub use geometry::{GeometryError, NeighborGrid, Point, PointPattern, Window};
pub use interaction::{
    solve_knots, ArInteraction, Interaction, KnotError, StepInteraction, StraussInteraction,
};
pub use model::{
    log_h, log_h_replicates, CachedPattern, GibbsModel, ModelError, ReplicateSet, StagedBirth,
    StagedDeath,
};
pub use posterior::{batch_means_mcse, hpd, posterior_predictive_gof, GofBands, HpdInterval};
pub use summaries::{
    default_bandwidth, default_grid, empirical_pcf, k_hat, lisa_pcf, loh_bootstrap,
    smoothing_kernel, EdgeCorrection, PcfEstimate, RadiusGrid, SummaryError,
};
