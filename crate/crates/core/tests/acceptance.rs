//! Acceptance checks. Each test prints one `PASS`/`FAIL` line before asserting.
//!
//! Run with `cargo test -p swarmwalk --test acceptance -- --nocapture`.

use std::collections::BTreeMap;
use std::process::Command;

use rand::{Rng, SeedableRng};
use swarmwalk::graph::SwarmGraph;
use swarmwalk::harness::{mean_best_fitness, run_experiment, AggregateStats};
use swarmwalk::rwpso::{
    compute_delta, displacement_vector, gaussian_term, update_position, SigmaMode,
};
use swarmwalk::walk::{biased_walk, constrained_biased_walk, simple_walk, walk_expectation};
use swarmwalk::{
    Algorithm, Benchmark, ExperimentSpec, Position, RwpsoConfig, SearchDomain, Sense, SwarmRng,
};

fn report(id: u32, ok: bool, detail: &str) {
    println!(
        "{} criterion {id}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(ok, "criterion {id} failed: {detail}");
}

#[test]
fn criterion_1_worked_graph_example() {
    let swarm: Vec<Position> = vec![
        vec![-2.0, 4.0],
        vec![5.0, 5.0],
        vec![8.0, -1.0],
        vec![4.0, -6.0],
        vec![-4.0, -3.0],
    ];
    let fit: Vec<f64> = swarm
        .iter()
        .map(|p| p.iter().map(|v| v * v).sum::<f64>().sqrt())
        .collect();
    let g = SwarmGraph::build(&swarm, &fit, Sense::Minimize).unwrap();
    let denom: f64 = (0..5).map(|k| g.alpha[k] as f64 * g.distances[k][0]).sum();
    let expected = [0.05, 0.23, 0.12, 0.25, 0.32];
    let row = &g.prob_rows[0];
    let ok = g.alpha == vec![5, 3, 1, 2, 4]
        && (denom - 89.83).abs() <= 0.05
        && row.iter().zip(expected).all(|(p, e)| (p - e).abs() <= 0.02);
    report(
        1,
        ok,
        &format!(
            "ranks {:?}, denominator {denom:.3}, row {:?}",
            g.alpha,
            rounded(row)
        ),
    );
}

fn rounded(xs: &[f64]) -> Vec<f64> {
    xs.iter().map(|x| (x * 1000.0).round() / 1000.0).collect()
}

#[test]
fn criterion_2_rows_are_stochastic() {
    let mut rng = SwarmRng::seed_from_u64(2);
    let mut worst = 0.0f64;
    let mut ranks_ok = true;
    for _ in 0..1000 {
        let n = rng.random_range(2..=100);
        let dim = rng.random_range(1..=30);
        let ps: Vec<Position> = (0..n)
            .map(|_| (0..dim).map(|_| rng.random_range(-100.0..100.0)).collect())
            .collect();
        let fit: Vec<f64> = ps.iter().map(|p| p.iter().map(|v| v * v).sum()).collect();
        let g = SwarmGraph::build(&ps, &fit, Sense::Minimize).unwrap();
        for row in &g.prob_rows {
            worst = worst.max((row.iter().sum::<f64>() - 1.0).abs());
        }
        let mut sorted = g.alpha.clone();
        sorted.sort_unstable();
        ranks_ok &= sorted == (1..=n).collect::<Vec<_>>();
    }
    report(
        2,
        worst <= 1e-12 && ranks_ok,
        &format!(
            "1000 swarms, max |row sum - 1| = {worst:.2e}, ranks are permutations: {ranks_ok}"
        ),
    );
}

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn criterion_3_walk_statistics() {
    let trials = 10_000;
    let mut rng = SwarmRng::seed_from_u64(3);
    let fair: Vec<f64> = (0..trials)
        .map(|_| simple_walk(100, &mut rng) as f64)
        .collect();
    let rms = (fair.iter().map(|s| s * s).sum::<f64>() / trials as f64).sqrt();
    let biased: Vec<f64> = (0..trials)
        .map(|_| biased_walk(100, 0.7, &mut rng).unwrap() as f64)
        .collect();
    let (biased_mean, _) = mean_and_se(&biased);
    let (p, plus, minus) = (0.6, 1.5, 0.5);
    let constrained: Vec<f64> = (0..trials)
        .map(|_| constrained_biased_walk(100, p, plus, minus, &mut rng).unwrap())
        .collect();
    let (c_mean, c_se) = mean_and_se(&constrained);
    let expected = walk_expectation(100, p, plus, minus);
    let ok = (rms - 10.0).abs() <= 0.5
        && (biased_mean - 40.0).abs() <= 1.0
        && (c_mean - expected).abs() <= 4.0 * c_se;
    report(
        3,
        ok,
        &format!(
            "fair RMS {rms:.3}, biased mean {biased_mean:.3}, constrained mean {c_mean:.3} vs {expected} (se {c_se:.3})"
        ),
    );
}

#[test]
fn criterion_4_delta_identities() {
    let mut rng = SwarmRng::seed_from_u64(4);
    let mut ok = true;
    for n in [1usize, 2, 7, 100, 5000] {
        ok &= compute_delta(0.0, n).unwrap() == 0.5;
        ok &= compute_delta(n as f64, n).unwrap() == 0.0;
        ok &= compute_delta(-(n as f64), n).unwrap() == 1.0;
    }
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let n = rng.random_range(1..=100_000usize);
        let d = rng.random_range(-1e6..1e6);
        let sum = compute_delta(d, n).unwrap() + compute_delta(-d, n).unwrap();
        worst = worst.max((sum - 1.0).abs());
    }
    ok &= worst < 1e-9;
    report(
        4,
        ok,
        &format!("fixed points hold, 10000 random pairs, max |sum - 1| = {worst:.2e}"),
    );
}

#[test]
fn criterion_5_drift_telescoping() {
    let dim = 6;
    let domain = SearchDomain::uniform(dim, -100.0, 100.0, -100.0, 100.0).unwrap();
    let mut rng = SwarmRng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for n in [1usize, 2, 5, 20, 100] {
        let config = RwpsoConfig {
            walk_horizon: Some(n),
            gaussian_sigma_mode: SigmaMode::Fixed,
            gaussian_sigma: 1e-12,
            gaussian_decay: None,
            ..RwpsoConfig::default()
        };
        let start: Position = (0..dim).map(|_| rng.random_range(-90.0..90.0)).collect();
        let target: Position = (0..dim).map(|_| rng.random_range(-90.0..90.0)).collect();
        let drift = displacement_vector(&start, &target, &config).unwrap();
        let mut x = start;
        for t in 0..n {
            let noise = gaussian_term(&config, &domain, t, &mut rng).unwrap();
            x = update_position(&x, &drift, &noise, &domain).unwrap();
        }
        for (a, b) in x.iter().zip(&target) {
            worst = worst.max((a - b).abs());
        }
    }
    report(
        5,
        worst <= 1e-6,
        &format!("horizons 1..100, max distance to frozen target {worst:.2e}"),
    );
}

fn single_cell(
    function: Benchmark,
    algorithm: Algorithm,
    pop: usize,
    dim: usize,
    iters: usize,
    threshold: Option<f64>,
) -> AggregateStats {
    let spec = ExperimentSpec {
        functions: vec![function],
        algorithms: vec![algorithm],
        population_sizes: vec![pop],
        dimensions: vec![dim],
        runs_per_cell: 50,
        max_iterations: iters,
        fitness_thresholds: BTreeMap::from([(function, threshold)]),
        ..ExperimentSpec::default()
    };
    let report = run_experiment(&spec).unwrap();
    assert!(report.failures.is_empty(), "{:?}", report.failures);
    assert_eq!(report.stats.len(), 1);
    report.stats[0].clone()
}

#[test]
fn criterion_6_sphere_convergence() {
    let rw = single_cell(Benchmark::Sphere, Algorithm::Rwpso, 20, 10, 500, Some(1e-2));
    let pso = single_cell(Benchmark::Sphere, Algorithm::Pso, 20, 10, 1000, Some(1e-2));
    let spec = ExperimentSpec::default();
    let ok = rw.success_rate >= 0.9
        && pso.success_rate >= 0.9
        && spec.pso.c1 == 2.0
        && spec.pso.c2 == 2.0
        && spec.pso.w_start == 0.9
        && spec.pso.w_end == 0.4;
    report(
        6,
        ok,
        &format!(
            "rwpso success {:.2} (mean {:.1} iterations, cap 500), pso success {:.2} (mean {:.1} iterations, cap 1000)",
            rw.success_rate, rw.mean_iterations, pso.success_rate, pso.mean_iterations
        ),
    );
}

#[test]
fn criterion_7_rastrigin_ordering() {
    let rw = single_cell(Benchmark::Rastrigin, Algorithm::Rwpso, 80, 10, 300, None);
    let pso = single_cell(Benchmark::Rastrigin, Algorithm::Pso, 80, 10, 300, None);
    assert_eq!(rw.mean_iterations, 300.0);
    assert_eq!(pso.mean_iterations, 300.0);
    report(
        7,
        rw.mean_best_fitness <= pso.mean_best_fitness,
        &format!(
            "N=80 D=10 300 iterations, mean best fitness rwpso {:.3} vs pso {:.3}",
            rw.mean_best_fitness, pso.mean_best_fitness
        ),
    );
}

#[test]
fn criterion_8_cli_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.json");
    std::fs::write(
        &config,
        r#"{
  "functions": ["sphere", "rastrigin", "binh4"],
  "population_sizes": [10, 20],
  "dimensions": [3],
  "runs_per_cell": 6,
  "max_iterations": 80,
  "base_seed": 99
}"#,
    )
    .unwrap();
    let mut outputs = Vec::new();
    for name in ["a.csv", "b.csv"] {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_swarmwalk"))
            .arg("run")
            .arg("--config")
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success());
        outputs.push(std::fs::read(&out).unwrap());
    }
    let rows = String::from_utf8_lossy(&outputs[0]).lines().count() - 1;
    report(
        8,
        outputs[0] == outputs[1] && rows > 0,
        &format!(
            "two runs, {rows} rows, {} bytes, identical: {}",
            outputs[0].len(),
            outputs[0] == outputs[1]
        ),
    );
}

#[test]
fn criterion_9_mean_best_fitness() {
    let a = mean_best_fitness(&[1.0, 2.0, 3.0, 4.0, 5.0], 0.8, Sense::Minimize).unwrap();
    let xs = [3.5, -1.25, 8.0, 0.125, 2.0, 7.75];
    let plain = xs.iter().sum::<f64>() / xs.len() as f64;
    let b = mean_best_fitness(&xs, 1.0, Sense::Minimize).unwrap();
    report(
        9,
        a == 2.5 && (b - plain).abs() <= 1e-12,
        &format!("(1..5, 0.8) -> {a}, full fraction {b} vs plain mean {plain}"),
    );
}
