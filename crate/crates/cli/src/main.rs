//! Command-line driver: `simulate`, `fit`, `pcf`, and `gof`.
//!
//! Every command takes `--config <path>` (TOML) plus targeted overrides and
//! writes its artifacts together with a JSON run manifest. Exit codes:
//! 0 success, 2 config error, 3 data error, 4 numerical failure.

mod config;
mod error;
mod io;
mod svg;

use argibbs::{
    batch_means_mcse, bd::run_chain, empirical_pcf, fit_attraction_repulsion,
    fix_hardcore_radius, hpd, loh_bootstrap, posterior_predictive_gof, BdConfig, CachedPattern,
    PointPattern, RadiusGrid, ReplicateSet, Window,
};
use clap::{Args, Parser, Subcommand};
use config::{HardCoreSpec, RunConfig};
use error::{CliError, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::PathBuf;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "argibbs", version, about = "Attraction-repulsion Gibbs point processes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Forward-simulate point patterns at fixed parameters
    Simulate(CommonArgs),
    /// Fit the model to replicate data via double Metropolis-Hastings
    Fit(CommonArgs),
    /// Pair correlation function with bootstrap confidence bands
    Pcf(CommonArgs),
    /// Posterior-predictive goodness-of-fit bands from a fitted chain
    Gof(GofArgs),
}

#[derive(Args)]
struct CommonArgs {
    /// TOML run configuration
    #[arg(long)]
    config: PathBuf,
    /// Override the active command's RNG seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override the output directory
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args)]
struct GofArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Chain CSV produced by `fit`
    #[arg(long)]
    chain: PathBuf,
}

fn main() {
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => cmd_simulate(&args),
        Command::Fit(args) => cmd_fit(&args),
        Command::Pcf(args) => cmd_pcf(&args),
        Command::Gof(args) => cmd_gof(&args),
    };
    if let Err(err) = outcome {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}

struct Prepared {
    cfg: RunConfig,
    window: Window,
    out_dir: PathBuf,
    started: Instant,
}

fn prepare(args: &CommonArgs) -> Result<Prepared> {
    let cfg = RunConfig::load(&args.config)?;
    let window = cfg.window.build()?;
    let out_dir = args.out_dir.clone().unwrap_or_else(|| cfg.output.dir.clone());
    std::fs::create_dir_all(&out_dir)
        .map_err(|e| CliError::data(format!("cannot create {}: {e}", out_dir.display())))?;
    Ok(Prepared {
        cfg,
        window,
        out_dir,
        started: Instant::now(),
    })
}

fn fixed_hard_core(cfg: &RunConfig) -> Result<f64> {
    match &cfg.model.hard_core {
        HardCoreSpec::Fixed(v) => Ok(*v),
        HardCoreSpec::Mode(_) => Err(CliError::config(
            "this command needs a numeric model.hard_core (\"min-distance\" requires data)",
        )),
    }
}

fn resolve_hard_core(cfg: &RunConfig, data: &ReplicateSet) -> Result<f64> {
    match &cfg.model.hard_core {
        HardCoreSpec::Fixed(v) => Ok(*v),
        HardCoreSpec::Mode(_) => Ok(fix_hardcore_radius(data)?),
    }
}

fn load_replicates(cfg: &RunConfig, window: &Window) -> Result<(ReplicateSet, Vec<PathBuf>)> {
    let data = cfg
        .data
        .as_ref()
        .ok_or_else(|| CliError::config("missing [data] section with replicate files"))?;
    if data.replicates.is_empty() {
        return Err(CliError::config("data.replicates must list at least one file"));
    }
    let mut patterns = Vec::new();
    for path in &data.replicates {
        patterns.push(io::read_pattern_csv(path, window)?);
    }
    let reps = ReplicateSet::new(patterns).map_err(|e| CliError::data(e.to_string()))?;
    Ok((reps, data.replicates.clone()))
}

fn write_manifest(
    prep: &Prepared,
    command: &str,
    seed: u64,
    resolved: serde_json::Value,
    outputs: &[PathBuf],
) -> Result<()> {
    let manifest = serde_json::json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "seed": seed,
        "config": &prep.cfg,
        "resolved": resolved,
        "outputs": outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "walltime_secs": prep.started.elapsed().as_secs_f64(),
    });
    let path = prep.out_dir.join(format!("{command}_manifest.json"));
    io::write_atomic(
        &path,
        serde_json::to_string_pretty(&manifest)
            .expect("manifest serializes")
            .as_bytes(),
    )
}

fn resolve_pcf_grid(cfg: &RunConfig, reps: &ReplicateSet) -> Result<(f64, RadiusGrid)> {
    let delta = if cfg.pcf.delta > 0.0 {
        cfg.pcf.delta
    } else {
        argibbs::default_bandwidth(reps)
    };
    let r_min = if cfg.pcf.r_min > 0.0 { cfg.pcf.r_min } else { delta };
    let grid = RadiusGrid::linspace(r_min, cfg.pcf.r_max, cfg.pcf.n_radii)
        .map_err(|e| CliError::config(format!("pcf grid: {e}")))?;
    Ok((delta, grid))
}

fn cmd_simulate(args: &CommonArgs) -> Result<()> {
    let prep = prepare(args)?;
    let cfg = &prep.cfg;
    let params = cfg
        .params
        .as_ref()
        .ok_or_else(|| CliError::config("simulate needs a [params] section"))?
        .to_params();
    let sim = cfg.simulate.clone().unwrap_or_default();
    let seed = args.seed.unwrap_or(sim.seed);
    let hard_core = fixed_hard_core(cfg)?;
    let model = params.build(hard_core, cfg.model.r_max)?;

    let init = match &sim.init {
        Some(path) => io::read_pattern_csv(path, &prep.window)?,
        None => PointPattern::empty(prep.window),
    };
    let mut cache = CachedPattern::new(&init, model);
    if cache.hard_core_pairs() > 0 {
        return Err(CliError::data(
            "initial pattern violates the hard core".to_string(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bd_cfg = BdConfig::new(sim.burn_in, seed);
    run_chain(&mut cache, sim.burn_in, &bd_cfg, &mut rng);

    let mut outputs = Vec::new();
    let mut sizes = Vec::new();
    for i in 0..sim.n_patterns {
        if i > 0 {
            run_chain(&mut cache, sim.thin, &bd_cfg, &mut rng);
        }
        let pattern = cache.to_pattern();
        sizes.push(pattern.len());
        let path = prep.out_dir.join(format!("pattern_{:02}.csv", i + 1));
        io::write_pattern_csv(&path, &pattern)?;
        outputs.push(path);
    }
    let resolved = serde_json::json!({
        "hard_core": hard_core,
        "r_max": cfg.model.r_max,
        "pattern_sizes": sizes,
        "burn_in": sim.burn_in,
        "thin": sim.thin,
    });
    write_manifest(&prep, "simulate", seed, resolved, &outputs)?;
    println!(
        "simulate: wrote {} pattern(s) with {:?} points to {}",
        outputs.len(),
        sizes,
        prep.out_dir.display()
    );
    Ok(())
}

fn cmd_fit(args: &CommonArgs) -> Result<()> {
    let prep = prepare(args)?;
    let cfg = &prep.cfg;
    let (reps, rep_files) = load_replicates(cfg, &prep.window)?;
    let hard_core = resolve_hard_core(cfg, &reps)?;
    let dmh = cfg.dmh.clone().unwrap_or_default();
    let seed = args.seed.unwrap_or(dmh.seed);
    let prior = cfg.prior.clone().unwrap_or_default().resolve(hard_core);
    let dmh_cfg = argibbs::DmhConfig {
        n_outer: dmh.n_outer,
        m_inner: dmh.m_inner,
        thin: dmh.thin,
        n_adapt: dmh.n_adapt,
        proposal_sd: dmh.proposal_sd.map(|sd| sd.to_sd()),
        rng_seed: seed,
        inner_max_points: None,
    };
    let chain = fit_attraction_repulsion(&reps, &prior, &dmh_cfg, hard_core, cfg.model.r_max)?;

    let chain_path = prep.out_dir.join("chain.csv");
    io::write_chain_csv(&chain_path, &chain.samples, &chain.accepted)?;

    let summary = summarize_chain(&chain)?;
    let summary_path = prep.out_dir.join("summary.json");
    io::write_atomic(
        &summary_path,
        serde_json::to_string_pretty(&summary).expect("summary serializes").as_bytes(),
    )?;

    let resolved = serde_json::json!({
        "hard_core": hard_core,
        "r_max": cfg.model.r_max,
        "prior": prior,
        "m_inner": if dmh.m_inner > 0 { dmh.m_inner } else {
            10_000u64.max((3.0 * reps.mean_points()).ceil() as u64)
        },
        "replicates": rep_files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "replicate_sizes": reps.patterns().iter().map(|p| p.len()).collect::<Vec<_>>(),
        "accept_rate": chain.accept_rate(),
        "step_scale": chain.step_scale,
    });
    write_manifest(&prep, "fit", seed, resolved, &[chain_path, summary_path])?;
    println!(
        "fit: {} retained samples, acceptance rate {:.3}",
        chain.samples.len(),
        chain.accept_rate()
    );
    Ok(())
}

fn summarize_chain(chain: &argibbs::PosteriorChain) -> Result<serde_json::Value> {
    if chain.samples.is_empty() {
        return Err(CliError::numeric("chain is empty; nothing to summarize"));
    }
    type Getter = fn(&argibbs::ArParams) -> f64;
    let columns: [(&str, Getter); 5] = [
        ("lambda", |p| p.lambda),
        ("theta1", |p| p.theta1),
        ("theta2", |p| p.theta2),
        ("theta3", |p| p.theta3),
        ("k", |p| p.k),
    ];
    let mut params = serde_json::Map::new();
    for (name, get) in &columns {
        let values: Vec<f64> = chain.samples.iter().map(get).collect();
        let mean = values.iter().sum::<f64>() / values.len() as f64;
        let interval = hpd(&values, 0.95).ok();
        let mcse = batch_means_mcse(&values).ok();
        params.insert(
            (*name).to_string(),
            serde_json::json!({
                "mean": mean,
                "hpd_lo": interval.map(|h| h.lo),
                "hpd_hi": interval.map(|h| h.hi),
                "mcse": mcse,
            }),
        );
    }
    Ok(serde_json::json!({
        "n_samples": chain.samples.len(),
        "accept_rate": chain.accept_rate(),
        "hpd_level": 0.95,
        "parameters": params,
    }))
}

fn cmd_pcf(args: &CommonArgs) -> Result<()> {
    let prep = prepare(args)?;
    let cfg = &prep.cfg;
    let (reps, rep_files) = load_replicates(cfg, &prep.window)?;
    let seed = args.seed.unwrap_or(cfg.pcf.seed);
    let (delta, grid) = resolve_pcf_grid(cfg, &reps)?;
    let est = loh_bootstrap(&reps, &grid, delta, cfg.pcf.n_boot, seed)
        .map_err(CliError::from)?;

    let pcf_path = prep.out_dir.join("pcf.csv");
    io::write_pcf_csv(&pcf_path, grid.values(), &est.g_hat, &est.lo95, &est.hi95)?;
    let mut outputs = vec![pcf_path];

    let meta = serde_json::json!({
        "delta": delta,
        "n_boot": est.n_boot,
        "seed": seed,
        "replicates": rep_files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        // Radii below the bandwidth are smoothing-bias-prone.
        "bias_prone_below": delta,
    });
    let meta_path = prep.out_dir.join("pcf_meta.json");
    io::write_atomic(
        &meta_path,
        serde_json::to_string_pretty(&meta).expect("meta serializes").as_bytes(),
    )?;
    outputs.push(meta_path);

    if cfg.output.svg {
        let plot = svg::render(&svg::BandPlot {
            title: "Pair correlation function",
            x: grid.values(),
            band_lo: &est.lo95,
            band_hi: &est.hi95,
            band_label: "95% bootstrap band",
            series: vec![svg::Series {
                y: &est.g_hat,
                color: "#c23b22",
                label: "g_hat",
            }],
        });
        let svg_path = prep.out_dir.join("pcf.svg");
        io::write_atomic(&svg_path, plot.as_bytes())?;
        outputs.push(svg_path);
    }

    let resolved = serde_json::json!({ "delta": delta, "n_boot": cfg.pcf.n_boot });
    write_manifest(&prep, "pcf", seed, resolved, &outputs)?;
    println!("pcf: wrote {} radii to {}", grid.len(), prep.out_dir.display());
    Ok(())
}

fn cmd_gof(args: &GofArgs) -> Result<()> {
    let prep = prepare(&args.common)?;
    let cfg = &prep.cfg;
    let (reps, rep_files) = load_replicates(cfg, &prep.window)?;
    let chain = io::read_chain_csv(&args.chain)?;
    if chain.is_empty() {
        return Err(CliError::data(format!(
            "chain {} contains no samples",
            args.chain.display()
        )));
    }
    let hard_core = resolve_hard_core(cfg, &reps)?;
    let seed = args.common.seed.unwrap_or(cfg.gof.seed);
    let (delta, grid) = resolve_pcf_grid(cfg, &reps)?;

    let bands = posterior_predictive_gof(
        &chain,
        hard_core,
        cfg.model.r_max,
        &prep.window,
        &grid,
        delta,
        cfg.gof.n_sims,
        cfg.gof.sim_burn_in,
        seed,
    )?;
    let emp = empirical_pcf(&reps, &grid, delta).map_err(CliError::from)?;

    let gof_path = prep.out_dir.join("gof.csv");
    io::write_gof_csv(
        &gof_path,
        grid.values(),
        &bands.mean,
        &bands.lo95,
        &bands.hi95,
        &emp,
    )?;
    let mut outputs = vec![gof_path];

    if cfg.output.svg {
        let plot = svg::render(&svg::BandPlot {
            title: "Posterior-predictive PCF check",
            x: grid.values(),
            band_lo: &bands.lo95,
            band_hi: &bands.hi95,
            band_label: "posterior predictive 95%",
            series: vec![
                svg::Series {
                    y: &bands.mean,
                    color: "#4a6fd9",
                    label: "predictive mean",
                },
                svg::Series {
                    y: &emp,
                    color: "#c23b22",
                    label: "empirical PCF",
                },
            ],
        });
        let svg_path = prep.out_dir.join("gof.svg");
        io::write_atomic(&svg_path, plot.as_bytes())?;
        outputs.push(svg_path);
    }

    let inside = grid
        .values()
        .iter()
        .enumerate()
        .filter(|(i, _)| emp[*i] >= bands.lo95[*i] && emp[*i] <= bands.hi95[*i])
        .count();
    let resolved = serde_json::json!({
        "hard_core": hard_core,
        "r_max": cfg.model.r_max,
        "delta": delta,
        "n_sims": cfg.gof.n_sims,
        "chain": args.chain.display().to_string(),
        "chain_len": chain.len(),
        "replicates": rep_files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "fraction_inside_band": inside as f64 / grid.len() as f64,
    });
    write_manifest(&prep, "gof", seed, resolved, &outputs)?;
    println!(
        "gof: empirical PCF inside the band at {}/{} radii",
        inside,
        grid.len()
    );
    Ok(())
}

impl From<argibbs::SummaryError> for CliError {
    fn from(err: argibbs::SummaryError) -> Self {
        match err {
            argibbs::SummaryError::TooFewPoints { .. } => CliError::data(err.to_string()),
            _ => CliError::config(err.to_string()),
        }
    }
}
