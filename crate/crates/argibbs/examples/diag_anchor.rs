//! Decisive check for Setting 2: do patterns simulated at the fitted
//! ridge point reproduce the truth-simulated PCF?

use argibbs::{
    bd_run, empirical_pcf, ArParams, BdConfig, Point, PointPattern, RadiusGrid, ReplicateSet,
    Window,
};

fn sims(window: &Window, params: &ArParams, seed: u64, n: u64) -> ReplicateSet {
    let model = params.build(0.0, 100.0).unwrap();
    let mut pats = Vec::new();
    for i in 0..3 {
        let cfg = BdConfig::new(n, seed + i);
        pats.push(bd_run(&PointPattern::empty(*window), model, &cfg).unwrap());
    }
    ReplicateSet::new(pats).unwrap()
}

fn main() {
    let window = Window::disc(Point::new(0.0, 0.0), 450.0).unwrap();
    let truth = ArParams {
        lambda: 4e-4,
        theta1: 1.2,
        theta2: 15.0,
        theta3: 0.3,
        k: 1.2,
    };
    let ridge = ArParams {
        lambda: 4.5e-4,
        theta1: 1.228,
        theta2: 15.86,
        theta3: 0.89,
        k: 2.16,
    };

    let grid = RadiusGrid::linspace(4.0, 60.0, 29).unwrap();
    let delta = 4.0;

    // Equilibration check: same seed family, 250k vs 2M burn.
    let short = sims(&window, &truth, 42_000, 250_000);
    let long = sims(&window, &truth, 42_000, 2_000_000);
    let g_short = empirical_pcf(&short, &grid, delta).unwrap();
    let g_long = empirical_pcf(&long, &grid, delta).unwrap();

    // Ridge mimicry: independent seeds.
    let ridge_sims = sims(&window, &ridge, 77_000, 2_000_000);
    let g_ridge = empirical_pcf(&ridge_sims, &grid, delta).unwrap();
    // A second truth batch to gauge realization noise.
    let truth_b = sims(&window, &truth, 88_000, 2_000_000);
    let g_truth_b = empirical_pcf(&truth_b, &grid, delta).unwrap();

    println!(
        "counts: short {:?}, long {:?}, ridge {:?}, truth_b {:?}",
        short.patterns().iter().map(|p| p.len()).collect::<Vec<_>>(),
        long.patterns().iter().map(|p| p.len()).collect::<Vec<_>>(),
        ridge_sims.patterns().iter().map(|p| p.len()).collect::<Vec<_>>(),
        truth_b.patterns().iter().map(|p| p.len()).collect::<Vec<_>>(),
    );
    println!("r, g(short burn), g(long burn), g(ridge), g(truth batch B)");
    for (i, r) in grid.values().iter().enumerate() {
        println!(
            "{r:5.1}, {:.3}, {:.3}, {:.3}, {:.3}",
            g_short[i], g_long[i], g_ridge[i], g_truth_b[i]
        );
    }
}
