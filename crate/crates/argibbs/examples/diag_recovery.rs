//! Reference fits: long tuned chains for both recovery settings, to pin
//! down the desk-scale posterior means.

use argibbs::{
    bd_run, fit_attraction_repulsion, fix_hardcore_radius, hpd, ArParams, BdConfig, DmhConfig,
    Point, PointPattern, PriorSpec, ProposalSd, ReplicateSet, Window,
};
use std::time::Instant;

fn run_setting(name: &str, truth: ArParams, truth_r: f64, min_dist_mode: bool, seed: u64) {
    let t0 = Instant::now();
    let window = Window::disc(Point::new(0.0, 0.0), 450.0).unwrap();
    let model = truth.build(truth_r, 100.0).unwrap();
    let mut pats = Vec::new();
    for i in 0..3 {
        let cfg = BdConfig::new(250_000, seed + i);
        pats.push(bd_run(&PointPattern::empty(window), model, &cfg).unwrap());
    }
    let data = ReplicateSet::new(pats).unwrap();
    let hard_core = if min_dist_mode {
        fix_hardcore_radius(&data).unwrap()
    } else {
        0.0
    };
    println!(
        "{name}: sizes {:?}, hard core {hard_core:.3}",
        data.patterns().iter().map(|p| p.len()).collect::<Vec<_>>()
    );

    let prior = PriorSpec::defaults(hard_core);
    let sd = ProposalSd {
        log_lambda: 0.06,
        theta1: 0.05,
        theta2: 0.6,
        log_theta3: 0.30,
        k: 0.30,
    };
    let cfg = DmhConfig {
        n_outer: 40_000,
        m_inner: 0,
        thin: 10,
        n_adapt: 4_000,
        proposal_sd: Some(sd),
        rng_seed: seed + 10,
        inner_max_points: None,
    };
    let chain = fit_attraction_repulsion(&data, &prior, &cfg, hard_core, 100.0).unwrap();
    println!(
        "{name}: accept {:.3}, scale {:.3}, {:?}",
        chain.accept_rate(),
        chain.step_scale,
        t0.elapsed()
    );
    let col = |f: fn(&ArParams) -> f64| chain.samples.iter().map(f).collect::<Vec<f64>>();
    for (pname, vals, tv) in [
        ("lambda", col(|p| p.lambda), truth.lambda),
        ("theta1", col(|p| p.theta1), truth.theta1),
        ("theta2", col(|p| p.theta2), truth.theta2),
        ("theta3", col(|p| p.theta3), truth.theta3),
        ("k", col(|p| p.k), truth.k),
    ] {
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let h = hpd(&vals, 0.95).unwrap();
        let q = vals.len() / 4;
        let qm = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
        println!(
            "{name} {pname}: truth {tv}, mean {mean:.5} (rel {:.1}%), HPD ({:.5}, {:.5}), quarters [{:.4}, {:.4}, {:.4}, {:.4}]",
            100.0 * (mean - tv).abs() / tv,
            h.lo,
            h.hi,
            qm(&vals[..q]),
            qm(&vals[q..2 * q]),
            qm(&vals[2 * q..3 * q]),
            qm(&vals[3 * q..])
        );
    }
}

fn main() {
    run_setting(
        "setting1",
        ArParams {
            lambda: 3e-4,
            theta1: 1.5,
            theta2: 10.0,
            theta3: 0.2,
            k: 1.4,
        },
        3.0,
        true,
        41_000,
    );
}
