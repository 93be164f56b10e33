//! Posterior summaries and model checking: HPD intervals, batch-means
//! Monte Carlo standard errors, and posterior-predictive PCF bands.

use crate::bd::{run_chain, BdConfig};
use crate::dmh::{ArParams, DmhError};
use crate::geometry::{PointPattern, Window};
use crate::model::CachedPattern;
use crate::summaries::{pooled_point_estimate, quantile_type7, RadiusGrid};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PosteriorError {
    #[error("need at least {need} samples, found {found}")]
    TooFewSamples { need: usize, found: usize },
    #[error("interval level must lie strictly between 0 and 1")]
    BadLevel,
    #[error("chain is empty")]
    EmptyChain,
}

/// Highest posterior density interval from ordered MCMC samples.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HpdInterval {
    pub lo: f64,
    pub hi: f64,
    pub level: f64,
}

/// Chen-Shao HPD: among all windows of `ceil(level * N)` consecutive order
/// statistics, the narrowest (ties break to the smallest lower endpoint).
pub fn hpd(samples: &[f64], level: f64) -> Result<HpdInterval, PosteriorError> {
    let n = samples.len();
    if n < 2 {
        return Err(PosteriorError::TooFewSamples { need: 2, found: n });
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(PosteriorError::BadLevel);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let w = ((level * n as f64).ceil() as usize).clamp(1, n);
    let mut best_i = 0;
    let mut best_width = f64::INFINITY;
    for i in 0..=(n - w) {
        let width = sorted[i + w - 1] - sorted[i];
        if width < best_width {
            best_width = width;
            best_i = i;
        }
    }
    Ok(HpdInterval {
        lo: sorted[best_i],
        hi: sorted[best_i + w - 1],
        level,
    })
}

/// Batch-means Monte Carlo standard error of the chain mean, with
/// `floor(sqrt(N))` batches (the remainder samples are dropped).
pub fn batch_means_mcse(samples: &[f64]) -> Result<f64, PosteriorError> {
    let n = samples.len();
    if n < 100 {
        return Err(PosteriorError::TooFewSamples {
            need: 100,
            found: n,
        });
    }
    let b = (n as f64).sqrt().floor() as usize;
    let m = n / b;
    let mut means = Vec::with_capacity(b);
    for k in 0..b {
        let batch = &samples[k * m..(k + 1) * m];
        means.push(batch.iter().sum::<f64>() / m as f64);
    }
    let grand = means.iter().sum::<f64>() / b as f64;
    let ss: f64 = means.iter().map(|y| (y - grand) * (y - grand)).sum();
    let sigma2 = m as f64 / (b - 1) as f64 * ss;
    Ok((sigma2 / (b * m) as f64).sqrt())
}

/// Pointwise posterior-predictive envelope of the PCF.
#[derive(Clone, Debug)]
pub struct GofBands {
    pub grid: RadiusGrid,
    pub lo95: Vec<f64>,
    pub hi95: Vec<f64>,
    /// Pointwise mean of the simulated curves (plot center line).
    pub mean: Vec<f64>,
    pub n_sims: usize,
}

/// Posterior-predictive PCF bands: take `n_sims` parameter vectors evenly
/// spaced along the thinned chain, forward-simulate one pattern per vector
/// (`sim_steps` birth-death steps from the empty pattern), and envelope the
/// per-pattern PCF point estimates with pointwise 2.5%/97.5% quantiles.
#[allow(clippy::too_many_arguments)]
pub fn posterior_predictive_gof(
    samples: &[ArParams],
    hard_core: f64,
    r_max: f64,
    window: &Window,
    grid: &RadiusGrid,
    delta: f64,
    n_sims: usize,
    sim_steps: u64,
    seed: u64,
) -> Result<GofBands, DmhError> {
    if samples.is_empty() {
        return Err(DmhError::BadConfig("chain is empty"));
    }
    if n_sims == 0 {
        return Err(DmhError::BadConfig("n_sims must be >= 1"));
    }
    let chain_len = samples.len();
    let picks: Vec<ArParams> = (0..n_sims)
        .map(|i| {
            let idx = if n_sims == 1 {
                (chain_len - 1) / 2
            } else {
                ((i as f64) * (chain_len - 1) as f64 / (n_sims - 1) as f64).round() as usize
            };
            samples[idx]
        })
        .collect();

    let curves: Vec<Vec<f64>> = picks
        .par_iter()
        .enumerate()
        .map(|(i, params)| -> Result<Vec<f64>, DmhError> {
            let model = params.build(hard_core, r_max)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64 + 1);
            let mut cache = CachedPattern::new(&PointPattern::empty(*window), model);
            let cfg = BdConfig::new(sim_steps, 0);
            run_chain(&mut cache, sim_steps, &cfg, &mut rng);
            let pattern = cache.into_pattern();
            Ok(pattern_point_estimate(&pattern, grid, delta))
        })
        .collect::<Result<_, _>>()?;

    let n_radii = grid.len();
    let mut lo95 = Vec::with_capacity(n_radii);
    let mut hi95 = Vec::with_capacity(n_radii);
    let mut mean = Vec::with_capacity(n_radii);
    let mut col = vec![0.0; curves.len()];
    for r in 0..n_radii {
        for (i, c) in curves.iter().enumerate() {
            col[i] = c[r];
        }
        mean.push(col.iter().sum::<f64>() / col.len() as f64);
        col.sort_by(|a, b| a.partial_cmp(b).unwrap());
        lo95.push(quantile_type7(&col, 0.025));
        hi95.push(quantile_type7(&col, 0.975));
    }
    Ok(GofBands {
        grid: grid.clone(),
        lo95,
        hi95,
        mean,
        n_sims,
    })
}

/// PCF point estimate of a single simulated pattern; patterns with fewer
/// than two points contribute a zero curve (no pairs).
pub fn pattern_point_estimate(pattern: &PointPattern, grid: &RadiusGrid, delta: f64) -> Vec<f64> {
    match crate::summaries::lisa_pcf(pattern, grid, delta) {
        Ok(rows) => pooled_point_estimate(&rows, grid.len()),
        Err(_) => vec![0.0; grid.len()],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn hpd_of_constant_chain_has_zero_width() {
        let v = vec![2.5; 50];
        let h = hpd(&v, 0.95).unwrap();
        assert_eq!(h.lo, 2.5);
        assert_eq!(h.hi, 2.5);
    }

    #[test]
    fn hpd_matches_naive_all_windows_scan() {
        let mut rng = ChaCha8Rng::seed_from_u64(81);
        let samples: Vec<f64> = (0..200)
            .map(|_| rng.sample::<f64, _>(StandardNormal) * (1.0 + rng.random::<f64>()))
            .collect();
        for level in [0.5, 0.9, 0.95] {
            let fast = hpd(&samples, level).unwrap();
            // Independent route: every pair of order statistics containing
            // at least ceil(level * N) samples.
            let mut sorted = samples.clone();
            sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let w = (level * sorted.len() as f64).ceil() as usize;
            let mut best = (f64::INFINITY, 0usize, 0usize);
            for i in 0..sorted.len() {
                for j in i..sorted.len() {
                    if j - i + 1 >= w {
                        let width = sorted[j] - sorted[i];
                        if width < best.0 {
                            best = (width, i, j);
                        }
                    }
                }
            }
            assert_eq!(fast.lo, sorted[best.1]);
            assert!((fast.hi - fast.lo - best.0).abs() < 1e-12);
        }
    }

    #[test]
    fn hpd_shift_invariance_and_minimality() {
        let mut rng = ChaCha8Rng::seed_from_u64(82);
        let samples: Vec<f64> = (0..5000)
            .map(|_| {
                let z: f64 = rng.sample(StandardNormal);
                z * z // skewed
            })
            .collect();
        let h = hpd(&samples, 0.9).unwrap();
        let shifted: Vec<f64> = samples.iter().map(|x| x + 7.0).collect();
        let hs = hpd(&shifted, 0.9).unwrap();
        assert!((hs.lo - h.lo - 7.0).abs() < 1e-12);
        assert!((hs.hi - h.hi - 7.0).abs() < 1e-12);

        // Equal-tailed interval at the same level is at least as wide.
        let mut sorted = samples;
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let lo = quantile_type7(&sorted, 0.05);
        let hi = quantile_type7(&sorted, 0.95);
        assert!(h.hi - h.lo <= hi - lo + 1e-12);
    }

    #[test]
    fn mcse_of_constant_chain_is_zero() {
        let v = vec![1.0; 400];
        assert_eq!(batch_means_mcse(&v).unwrap(), 0.0);
    }

    #[test]
    fn mcse_rejects_short_chains() {
        assert!(matches!(
            batch_means_mcse(&vec![0.0; 99]),
            Err(PosteriorError::TooFewSamples { .. })
        ));
    }

    #[test]
    fn degenerate_chain_bands_equal_fixed_theta_bands() {
        use crate::geometry::Window;
        let window = Window::rect(0.0, 0.0, 120.0, 120.0).unwrap();
        let grid = RadiusGrid::linspace(2.0, 30.0, 20).unwrap();
        let theta = ArParams {
            lambda: 2e-3,
            theta1: 1.3,
            theta2: 6.0,
            theta3: 0.4,
            k: 1.0,
        };
        let repeated = posterior_predictive_gof(
            &vec![theta; 7],
            0.0,
            40.0,
            &window,
            &grid,
            3.0,
            6,
            3_000,
            5,
        )
        .unwrap();
        let single = posterior_predictive_gof(
            &[theta], 0.0, 40.0, &window, &grid, 3.0, 6, 3_000, 5,
        )
        .unwrap();
        assert_eq!(repeated.lo95, single.lo95);
        assert_eq!(repeated.hi95, single.hi95);
        for i in 0..grid.len() {
            assert!(repeated.lo95[i] <= repeated.hi95[i]);
        }
    }

    #[test]
    fn bands_widen_with_parameter_dispersion() {
        use crate::geometry::Window;
        let window = Window::rect(0.0, 0.0, 120.0, 120.0).unwrap();
        let grid = RadiusGrid::linspace(2.0, 30.0, 20).unwrap();
        let center = ArParams {
            lambda: 2e-3,
            theta1: 1.3,
            theta2: 6.0,
            theta3: 0.4,
            k: 1.0,
        };
        let tight = vec![center; 24];
        let dispersed: Vec<ArParams> = (0..24)
            .map(|i| {
                let f = 0.55 + 0.9 * (i as f64 / 23.0); // lambda across (0.55..1.45)x
                ArParams {
                    lambda: center.lambda * f,
                    theta1: 1.05 + 0.5 * (i as f64 / 23.0),
                    ..center
                }
            })
            .collect();
        let a = posterior_predictive_gof(&tight, 0.0, 40.0, &window, &grid, 3.0, 24, 3_000, 9)
            .unwrap();
        let b =
            posterior_predictive_gof(&dispersed, 0.0, 40.0, &window, &grid, 3.0, 24, 3_000, 9)
                .unwrap();
        let width = |g: &GofBands| -> f64 {
            g.hi95
                .iter()
                .zip(&g.lo95)
                .map(|(h, l)| h - l)
                .sum::<f64>()
        };
        assert!(
            width(&b) > width(&a),
            "dispersed-chain bands ({}) not wider than degenerate-chain bands ({})",
            width(&b),
            width(&a)
        );
    }

    #[test]
    fn mcse_tracks_ar1_inflation() {
        // AR(1) with coefficient 0.9: asymptotic sd of the mean is
        // sqrt((1 + phi)/(1 - phi)) times the i.i.d. value.
        let mut rng = ChaCha8Rng::seed_from_u64(83);
        let n = 1_000_000usize;
        let phi = 0.9f64;
        let innov_sd = (1.0 - phi * phi).sqrt();
        let mut x = 0.0f64;
        let mut chain = Vec::with_capacity(n);
        for _ in 0..n {
            x = phi * x + innov_sd * rng.sample::<f64, _>(StandardNormal);
            chain.push(x);
        }
        let mcse = batch_means_mcse(&chain).unwrap();
        let iid = 1.0 / (n as f64).sqrt();
        let factor = ((1.0 + phi) / (1.0 - phi)).sqrt();
        assert!(
            (mcse / iid - factor).abs() < 0.25 * factor,
            "mcse {mcse}, expected about {}",
            iid * factor
        );
    }
}
