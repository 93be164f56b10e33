//! End-to-end tests of the binary: artifact schemas, determinism, exit
//! codes, and agreement between emitted summaries and recomputation.

use argibbs::{batch_means_mcse, hpd, ArParams, Point, PointPattern, Window};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_argibbs"))
}

fn run(args: &[&str], dir: &Path) -> Output {
    bin()
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("argibbs-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_pattern(path: &Path, points: &[(f64, f64)]) {
    let mut s = String::from("x,y\n");
    for (x, y) in points {
        s.push_str(&format!("{x:.16e},{y:.16e}\n"));
    }
    std::fs::write(path, s).unwrap();
}

fn random_pattern(seed: u64, n: usize, side: f64) -> Vec<(f64, f64)> {
    let w = Window::rect(0.0, 0.0, side, side).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            let p = w.sample_uniform(&mut rng);
            (p.x, p.y)
        })
        .collect()
}

const SIM_CONFIG: &str = r#"
[window]
shape = "rect"
x_min = 0.0
y_min = 0.0
x_max = 150.0
y_max = 150.0

[model]
hard_core = 2.0
r_max = 60.0

[params]
lambda = 1e-3
theta1 = 1.4
theta2 = 8.0
theta3 = 0.3
k = 1.2

[simulate]
n_patterns = 2
burn_in = 5000
thin = 1000
seed = 5
"#;

#[test]
fn simulate_is_byte_identical_across_reruns() {
    let dir = tmp_dir("sim-det");
    std::fs::write(dir.join("cfg.toml"), SIM_CONFIG).unwrap();
    for sub in ["a", "b"] {
        let out = run(
            &["simulate", "--config", "cfg.toml", "--out-dir", sub],
            &dir,
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    for name in ["pattern_01.csv", "pattern_02.csv"] {
        let a = std::fs::read(dir.join("a").join(name)).unwrap();
        let b = std::fs::read(dir.join("b").join(name)).unwrap();
        assert_eq!(a, b, "{name} differs between reruns");
    }
    // Different seed changes the output.
    let out = run(
        &["simulate", "--config", "cfg.toml", "--out-dir", "c", "--seed", "99"],
        &dir,
    );
    assert!(out.status.success());
    let a = std::fs::read(dir.join("a/pattern_01.csv")).unwrap();
    let c = std::fs::read(dir.join("c/pattern_01.csv")).unwrap();
    assert_ne!(a, c);
}

#[test]
fn simulate_zero_steps_echoes_init_exactly() {
    let dir = tmp_dir("sim-echo");
    let pts = vec![
        (1.0 / 3.0, 2.0f64.sqrt()),
        (140.0 - 1e-13, 0.1),
        (77.0 + std::f64::consts::E, 150.0f64.next_down()),
    ];
    write_pattern(&dir.join("init.csv"), &pts);
    let cfg = r#"
[window]
shape = "rect"
x_min = 0.0
y_min = 0.0
x_max = 150.0
y_max = 150.0

[model]
hard_core = 0.0

[params]
lambda = 1e-3
theta1 = 1.4
theta2 = 8.0
theta3 = 0.3
k = 1.2

[simulate]
n_patterns = 1
burn_in = 0
seed = 1
init = "init.csv"
"#;
    std::fs::write(dir.join("cfg.toml"), cfg).unwrap();
    let out = run(&["simulate", "--config", "cfg.toml", "--out-dir", "."], &dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // Full-precision round trip: the echoed pattern equals the init file.
    let echoed = std::fs::read_to_string(dir.join("pattern_01.csv")).unwrap();
    let mut parsed = Vec::new();
    for line in echoed.lines().skip(1) {
        let (x, y) = line.split_once(',').unwrap();
        parsed.push((x.parse::<f64>().unwrap(), y.parse::<f64>().unwrap()));
    }
    assert_eq!(parsed, pts);
}

const FIT_CONFIG: &str = r#"
[window]
shape = "rect"
x_min = 0.0
y_min = 0.0
x_max = 120.0
y_max = 120.0

[model]
hard_core = 0.0
r_max = 40.0

[data]
replicates = ["rep1.csv", "rep2.csv"]

[dmh]
n_outer = 200
m_inner = 80
thin = 2
n_adapt = 40
seed = 17

[pcf]
n_boot = 99
r_min = 2.0
r_max = 30.0
n_radii = 24

[gof]
n_sims = 5
sim_burn_in = 2000
"#;

#[test]
fn fit_summary_matches_recomputation_from_chain_csv() {
    let dir = tmp_dir("fit");
    write_pattern(&dir.join("rep1.csv"), &random_pattern(1, 18, 120.0));
    write_pattern(&dir.join("rep2.csv"), &random_pattern(2, 22, 120.0));
    std::fs::write(dir.join("cfg.toml"), FIT_CONFIG).unwrap();
    let out = run(&["fit", "--config", "cfg.toml", "--out-dir", "."], &dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    // Chain CSV: header plus n_outer/thin rows.
    let chain_text = std::fs::read_to_string(dir.join("chain.csv")).unwrap();
    let mut lines = chain_text.lines();
    assert_eq!(lines.next().unwrap(), "lambda,theta1,theta2,theta3,k,accepted");
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 100);

    let mut samples: Vec<ArParams> = Vec::new();
    for row in &rows {
        let f: Vec<f64> = row.split(',').take(5).map(|v| v.parse().unwrap()).collect();
        samples.push(ArParams {
            lambda: f[0],
            theta1: f[1],
            theta2: f[2],
            theta3: f[3],
            k: f[4],
        });
    }
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap();
    type Getter = fn(&ArParams) -> f64;
    let cols: [(&str, Getter); 5] = [
        ("lambda", |p| p.lambda),
        ("theta1", |p| p.theta1),
        ("theta2", |p| p.theta2),
        ("theta3", |p| p.theta3),
        ("k", |p| p.k),
    ];
    for (name, get) in cols {
        let vals: Vec<f64> = samples.iter().map(get).collect();
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        let interval = hpd(&vals, 0.95).unwrap();
        let mcse = batch_means_mcse(&vals).unwrap();
        let entry = &summary["parameters"][name];
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * b.abs().max(1e-300);
        assert!(close(entry["mean"].as_f64().unwrap(), mean), "{name} mean");
        assert!(close(entry["hpd_lo"].as_f64().unwrap(), interval.lo), "{name} hpd_lo");
        assert!(close(entry["hpd_hi"].as_f64().unwrap(), interval.hi), "{name} hpd_hi");
        assert!(close(entry["mcse"].as_f64().unwrap(), mcse), "{name} mcse");
    }
}

#[test]
fn pcf_schema_and_gof_degenerate_chain() {
    let dir = tmp_dir("pcf-gof");
    write_pattern(&dir.join("rep1.csv"), &random_pattern(3, 30, 120.0));
    write_pattern(&dir.join("rep2.csv"), &random_pattern(4, 28, 120.0));
    std::fs::write(dir.join("cfg.toml"), FIT_CONFIG).unwrap();

    let out = run(&["pcf", "--config", "cfg.toml", "--out-dir", "."], &dir);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let pcf_text = std::fs::read_to_string(dir.join("pcf.csv")).unwrap();
    let mut lines = pcf_text.lines();
    assert_eq!(lines.next().unwrap(), "r,g_hat,lo95,hi95");
    assert_eq!(lines.count(), 24);

    // A chain holding one repeated parameter vector: the bands reflect only
    // simulation variability at that vector, which we recompute directly.
    let theta = ArParams {
        lambda: 2e-3,
        theta1: 1.3,
        theta2: 6.0,
        theta3: 0.4,
        k: 1.0,
    };
    let mut chain = String::from("lambda,theta1,theta2,theta3,k,accepted\n");
    for _ in 0..3 {
        chain.push_str(&format!(
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},1\n",
            theta.lambda, theta.theta1, theta.theta2, theta.theta3, theta.k
        ));
    }
    std::fs::write(dir.join("flat_chain.csv"), chain).unwrap();
    let out = run(
        &["gof", "--config", "cfg.toml", "--chain", "flat_chain.csv", "--out-dir", "."],
        &dir,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let gof_text = std::fs::read_to_string(dir.join("gof.csv")).unwrap();
    let mut lines = gof_text.lines();
    assert_eq!(lines.next().unwrap(), "r,g_hat,lo95,hi95,g_emp");

    // Recompute the fixed-theta bands through the library with the same
    // inputs; the emitted CSV must match.
    let window = Window::rect(0.0, 0.0, 120.0, 120.0).unwrap();
    let reps = {
        let read = |name: &str| {
            let text = std::fs::read_to_string(dir.join(name)).unwrap();
            let pts: Vec<Point> = text
                .lines()
                .skip(1)
                .map(|l| {
                    let (x, y) = l.split_once(',').unwrap();
                    Point::new(x.parse().unwrap(), y.parse().unwrap())
                })
                .collect();
            PointPattern::new(window, pts).unwrap()
        };
        argibbs::ReplicateSet::new(vec![read("rep1.csv"), read("rep2.csv")]).unwrap()
    };
    let delta = argibbs::default_bandwidth(&reps);
    let grid = argibbs::RadiusGrid::linspace(2.0, 30.0, 24).unwrap();
    let flat = vec![theta; 3];
    let bands = argibbs::posterior_predictive_gof(
        &flat,
        0.0,
        40.0,
        &window,
        &grid,
        delta,
        5,
        2000,
        0,
    )
    .unwrap();
    for (i, line) in gof_text.lines().skip(1).enumerate() {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        assert!((f[2] - bands.lo95[i]).abs() <= 1e-12 * bands.lo95[i].abs().max(1e-300));
        assert!((f[3] - bands.hi95[i]).abs() <= 1e-12 * bands.hi95[i].abs().max(1e-300));
    }
}

#[test]
fn error_exit_codes() {
    let dir = tmp_dir("errors");
    // Unknown config key: exit 2.
    std::fs::write(
        dir.join("bad.toml"),
        "[window]\nshape = \"disc\"\nradius = 10.0\nwat = 1\n",
    )
    .unwrap();
    let out = run(&["pcf", "--config", "bad.toml"], &dir);
    assert_eq!(out.status.code(), Some(2));

    // Data outside the window: exit 3, offender listed.
    write_pattern(&dir.join("bad_pts.csv"), &[(5.0, 5.0), (500.0, 5.0)]);
    let cfg = r#"
[window]
shape = "rect"
x_min = 0.0
y_min = 0.0
x_max = 50.0
y_max = 50.0

[data]
replicates = ["bad_pts.csv"]
"#;
    std::fs::write(dir.join("data.toml"), cfg).unwrap();
    let out = run(&["pcf", "--config", "data.toml"], &dir);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("500"));

    // Invalid peak height: knot failure, exit 4.
    let cfg = r#"
[window]
shape = "rect"
x_min = 0.0
y_min = 0.0
x_max = 50.0
y_max = 50.0

[params]
lambda = 1e-3
theta1 = 1.0
theta2 = 8.0
theta3 = 0.3
k = 1.0

[simulate]
burn_in = 10
"#;
    std::fs::write(dir.join("knot.toml"), cfg).unwrap();
    let out = run(&["simulate", "--config", "knot.toml"], &dir);
    assert_eq!(out.status.code(), Some(4));

    // Empty chain file: exit 3.
    write_pattern(&dir.join("ok.csv"), &[(5.0, 5.0), (9.0, 22.0)]);
    std::fs::write(dir.join("empty_chain.csv"), "lambda,theta1,theta2,theta3,k,accepted\n")
        .unwrap();
    let cfg = r#"
[window]
shape = "rect"
x_min = 0.0
y_min = 0.0
x_max = 50.0
y_max = 50.0

[data]
replicates = ["ok.csv"]
"#;
    std::fs::write(dir.join("gof.toml"), cfg).unwrap();
    let out = run(
        &["gof", "--config", "gof.toml", "--chain", "empty_chain.csv"],
        &dir,
    );
    assert_eq!(out.status.code(), Some(3));
}
