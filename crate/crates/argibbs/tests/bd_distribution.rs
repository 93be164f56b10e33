//! Distributional checks for the birth-death chain against independent
//! numerical oracles.

use argibbs::{
    bd_run, loh_bootstrap, BdConfig, CachedPattern, GibbsModel, Point, PointPattern, RadiusGrid,
    ReplicateSet, StraussInteraction, Window,
};
use argibbs::{ArInteraction, bd::run_chain};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Radical-inverse Halton point in the given prime base.
fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

const PRIMES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

/// Monte Carlo estimate (quasi-random nodes) of
/// `I_n = E[ gamma^(2 s) ]` for `n` i.i.d. uniform points on the unit
/// square, where `s` counts pairs within distance `radius`.
fn interaction_integral(n: usize, gamma: f64, radius: f64, nodes: u64) -> f64 {
    if n < 2 {
        return 1.0;
    }
    let r2 = radius * radius;
    let mut total = 0.0;
    let mut pts = vec![(0.0f64, 0.0f64); n];
    for node in 0..nodes {
        for (d, p) in pts.iter_mut().enumerate() {
            p.0 = radical_inverse(node + 1, PRIMES[2 * d]);
            p.1 = radical_inverse(node + 1, PRIMES[2 * d + 1]);
        }
        let mut s = 0u32;
        for i in 0..n {
            for j in (i + 1)..n {
                let dx = pts[i].0 - pts[j].0;
                let dy = pts[i].1 - pts[j].1;
                if dx * dx + dy * dy <= r2 {
                    s += 1;
                }
            }
        }
        total += gamma.powi(2 * s as i32);
    }
    total / nodes as f64
}

#[test]
fn strauss_count_distribution_matches_direct_integration() {
    // Strauss process on the unit square, capped at 6 points. The exact
    // count distribution is pi(n) proportional to (lambda^n / n!) I_n with
    // I_n evaluated by quasi-Monte Carlo integration.
    let lambda = 6.0f64;
    let gamma = 0.5f64;
    let radius = 0.15;
    let cap = 6usize;

    let mut weights = Vec::with_capacity(cap + 1);
    let mut factorial = 1.0;
    for n in 0..=cap {
        if n > 0 {
            factorial *= n as f64;
        }
        let i_n = interaction_integral(n, gamma, radius, 1_000_000);
        weights.push(lambda.powi(n as i32) / factorial * i_n);
    }
    let z: f64 = weights.iter().sum();
    let exact: Vec<f64> = weights.iter().map(|w| w / z).collect();

    let w = Window::rect(0.0, 0.0, 1.0, 1.0).unwrap();
    let interaction = StraussInteraction::new(gamma, radius).unwrap();
    let model = GibbsModel::new(lambda, f64::INFINITY, interaction).unwrap();
    let mut cache = CachedPattern::new(&PointPattern::empty(w), model);
    let cfg = BdConfig {
        p_birth: 0.5,
        n_steps: 0,
        rng_seed: 0,
        max_points: Some(cap),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(314);
    run_chain(&mut cache, 100_000, &cfg, &mut rng);
    let mut counts = vec![0u64; cap + 1];
    let sweeps = 200_000u64;
    for _ in 0..sweeps {
        run_chain(&mut cache, 10, &cfg, &mut rng);
        counts[cache.len()] += 1;
    }
    let tv: f64 = exact
        .iter()
        .enumerate()
        .map(|(n, p)| (p - counts[n] as f64 / sweeps as f64).abs())
        .sum::<f64>()
        / 2.0;
    assert!(
        tv < 0.02,
        "total variation {tv} vs oracle; empirical {counts:?}, exact {exact:?}"
    );
}

#[test]
fn attraction_model_shows_pcf_peak_near_theta2() {
    // Forward-simulate the peaked interaction and check the bootstrap PCF
    // band admits attraction (values > 1) around the peak location.
    let window = Window::disc(Point::new(0.0, 0.0), 300.0).unwrap();
    let f = ArInteraction::new(1.5, 10.0, 0.2, 3.0, 100.0).unwrap();
    let model = GibbsModel::new(3e-4, 1.4, f).unwrap();
    let cfg = BdConfig::new(500_000, 2718);
    let pattern = bd_run(&PointPattern::empty(window), model, &cfg).unwrap();
    assert!(pattern.len() > 40, "simulation produced too few points");

    let reps = ReplicateSet::new(vec![pattern]).unwrap();
    let delta = argibbs::default_bandwidth(&reps);
    let grid = RadiusGrid::linspace(2.0, 30.0, 57).unwrap();
    let est = loh_bootstrap(&reps, &grid, delta, 199, 99).unwrap();
    let peak_band = grid
        .values()
        .iter()
        .zip(&est.hi95)
        .filter(|(r, _)| (8.0..=12.0).contains(*r))
        .map(|(_, hi)| *hi)
        .fold(f64::NEG_INFINITY, f64::max);
    assert!(
        peak_band > 1.0,
        "upper PCF band near the peak is {peak_band}, expected > 1"
    );
}
