//! Acceptance suite. Each test prints one `PASS`/`FAIL` line (directly to
//! stderr, so it shows even when output is captured) and then asserts.

use std::io::Write;
use std::path::Path;
use std::time::{Duration, Instant};

use rand::Rng;
use stable_sde_core::counterexample::{nonuniqueness_report, scaling_law_check, time_one_samples, v_law_report};
use stable_sde_core::driver::{levy_tail_mass, sample_exact_increment, sample_truncated_path};
use stable_sde_core::stats::ks_two_sample;
use stable_sde_core::time_change::{clock_roundtrip_residual, solve_time_change};
use stable_sde_core::truncation::{build_ladder, coupled_pair_distance, solve_truncated};
use stable_sde_core::{
    rng_for, Clock, ClockInverse, MonotonePhi, SampleSet, Sequential, SolverOptions, StableParams, StreamTag,
};
use stable_sde_lab::{run_experiment, ExperimentConfig, RayonReplicator};

const ARCTAN: &str = "shifted-arctan(2,0.6366)";

// criterion 1
const C1_REPLICATES: usize = 1000;
const C1_RUNTIME: Duration = Duration::from_secs(30);
// criterion 2
const C2_REL_TOL: f64 = 1e-12;
// criterion 3
const C3_SAMPLES: usize = 100_000;
const C3_SIGMAS: f64 = 3.0;
// criterion 4
const C4_ALPHA: f64 = 0.5;
const C4_EPS: f64 = 1e-3;
const C4_N: usize = 5000;
const C4_RUNTIME: Duration = Duration::from_secs(300);
// criterion 5
const C5_RESIDUAL: f64 = 1e-9;
// criterion 6
const C6_ALPHA: f64 = 0.1;
const C6_HORIZON: f64 = 100.0;
const C6_REPLICATES: usize = 500;
const C6_RATIO: f64 = 0.1;
// criteria 7 to 9
const KS_LEVEL: f64 = 0.01;
const SEEDS: u64 = 10;
const GRID_M: usize = 10_000;
const C7_N: usize = 5000;
const C8_N: usize = 2000;
const C8_POSITIVE: f64 = 0.99;
const C9_MIN_PASSING: usize = 8;
const C9_COVERAGE: f64 = 0.8;
const COUNTEREXAMPLE_HORIZON: f64 = 3.0;

fn report(criterion: u32, pass: bool, detail: impl AsRef<str>) {
    let verdict = if pass { "PASS" } else { "FAIL" };
    let line = format!("{verdict} criterion {criterion:>2}: {}\n", detail.as_ref());
    let _ = std::io::stderr().write_all(line.as_bytes());
    assert!(pass, "criterion {criterion} failed: {}", detail.as_ref());
}

fn arctan() -> MonotonePhi {
    ARCTAN.parse().unwrap()
}

#[test]
fn criterion_01_ladder_has_no_violations() {
    let params = StableParams::standard(0.7).unwrap();
    let cutoffs = [0.1, 0.03, 0.01, 0.003, 0.001];
    let phi = arctan();
    let start = Instant::now();
    let (mut violations, mut comparisons) = (0, 0);
    for i in 0..C1_REPLICATES {
        let mut rng = rng_for(1, i as u64, StreamTag::DRIVER);
        let ladder = build_ladder(&phi, 0.0, &params, 1.0, &cutoffs, &mut rng, &SolverOptions::default()).unwrap();
        violations += ladder.violations().len();
        comparisons += ladder.levels().iter().map(|l| l.events().len()).sum::<usize>();
    }
    let elapsed = start.elapsed();
    report(
        1,
        violations == 0 && elapsed < C1_RUNTIME,
        format!("{violations} violations over {C1_REPLICATES} ladders ({comparisons} level events), {elapsed:.2?}"),
    );
}

#[test]
fn criterion_02_linear_case_matches_driver() {
    let params = StableParams::standard(0.7).unwrap();
    let phi = MonotonePhi::constant(2.0).unwrap();
    let x0 = 0.25;
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let z = sample_truncated_path(&params, 1.0, 0.01, &mut rng_for(2, i, StreamTag::DRIVER)).unwrap();
        let x = solve_truncated(&phi, x0, &z, &SolverOptions::default()).unwrap();
        for e in x.events() {
            let expected = 2.0 * z.value(e.t).unwrap();
            worst = worst.max(((e.post - x0) - expected).abs() / expected);
        }
    }
    report(2, worst <= C2_REL_TOL, format!("max relative error {worst:.3e} (tolerance {C2_REL_TOL:e})"));
}

/// `∫_ε^∞ (1 - e^{-λh}) c h^{-1-α} dh` by Simpson's rule in `log h`, with the
/// tail beyond `H` taken as `c H^{-α}/α` (there `1 - e^{-λh} = 1` to machine
/// precision).
fn truncated_exponent_quadrature(alpha: f64, c: f64, eps: f64, lambda: f64) -> f64 {
    let big = 60.0 / lambda;
    let (a, b) = (eps.ln(), big.ln());
    let n = 20_000;
    let h = (b - a) / n as f64;
    let f = |u: f64| {
        let x = u.exp();
        -(-lambda * x).exp_m1() * c * (-alpha * u).exp()
    };
    let mut sum = f(a) + f(b);
    for k in 1..n {
        sum += f(a + k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
    }
    sum * h / 3.0 + c * big.powf(-alpha) / alpha
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[test]
fn criterion_03_driver_laplace_transforms() {
    let alpha = 0.7;
    let params = StableParams::standard(alpha).unwrap();
    let mut rng = rng_for(3, 0, StreamTag::REFERENCE);
    let exact: Vec<f64> =
        (0..C3_SAMPLES).map(|_| (-sample_exact_increment(&params, 1.0, &mut rng).unwrap()).exp()).collect();
    let (m1, s1) = mean_sd(&exact);
    let band1 = C3_SIGMAS * s1 / (C3_SAMPLES as f64).sqrt();
    let ok1 = (m1 - (-1.0f64).exp()).abs() <= band1;

    // truncated driver against quadrature; sanity check the oracle's tail
    // against the closed-form tail mass first
    let eps = 0.05;
    let c = params.c();
    let huge_lambda = truncated_exponent_quadrature(alpha, c, eps, 1e6);
    let tail = levy_tail_mass(&params, eps).unwrap();
    let oracle_ok = (huge_lambda - tail).abs() < 1e-3 * tail;
    let target = (-truncated_exponent_quadrature(alpha, c, eps, 1.0)).exp();
    let mut rng = rng_for(3, 1, StreamTag::DRIVER);
    let trunc: Vec<f64> = (0..C3_SAMPLES)
        .map(|_| {
            let z = sample_truncated_path(&params, 1.0, eps, &mut rng).unwrap();
            (-z.value(1.0).unwrap()).exp()
        })
        .collect();
    let (m2, s2) = mean_sd(&trunc);
    let band2 = C3_SIGMAS * s2 / (C3_SAMPLES as f64).sqrt();
    let ok2 = (m2 - target).abs() <= band2;
    report(
        3,
        ok1 && ok2 && oracle_ok,
        format!(
            "exact: mean e^-Z1 = {m1:.5} vs {:.5} (band ±{band1:.5}); truncated eps={eps}: {m2:.5} vs {target:.5} (band ±{band2:.5})",
            (-1.0f64).exp()
        ),
    );
}

#[test]
fn criterion_04_weak_agreement() {
    let params = StableParams::standard(C4_ALPHA).unwrap();
    let phi = arctan();
    let opts = SolverOptions::default();
    // φ <= 4, so B grows at least at rate 4^{-α} and reaches 1 before this
    let driver_horizon = 1.01 * 4f64.powf(C4_ALPHA);
    let start = Instant::now();
    let mut p_values = Vec::new();
    for seed in 0..SEEDS {
        let a: Vec<f64> = (0..C4_N as u64)
            .map(|i| {
                let z = sample_truncated_path(&params, 1.0, C4_EPS, &mut rng_for(seed, i, StreamTag::DRIVER)).unwrap();
                solve_truncated(&phi, 0.0, &z, &opts).unwrap().terminal()
            })
            .collect();
        let b: Vec<f64> = (0..C4_N as u64)
            .map(|i| {
                let mut rng = rng_for(seed, i, StreamTag::ALT_DRIVER);
                let z = sample_truncated_path(&params, driver_horizon, C4_EPS, &mut rng).unwrap();
                solve_time_change(&phi, 0.0, &z, C4_ALPHA).unwrap().value(1.0).unwrap()
            })
            .collect();
        let ks = ks_two_sample(&SampleSet::new(a).unwrap(), &SampleSet::new(b).unwrap()).unwrap();
        p_values.push(ks.p_value);
    }
    let elapsed = start.elapsed();
    let passing = p_values.iter().filter(|&&p| p > KS_LEVEL).count();
    report(
        4,
        passing >= 9 && elapsed < C4_RUNTIME,
        format!("alpha={C4_ALPHA}: {passing}/10 seeds with p > {KS_LEVEL}, p = {}, {elapsed:.2?}", fmt_list(&p_values)),
    );
}

fn fmt_list(v: &[f64]) -> String {
    let parts: Vec<String> = v.iter().map(|x| format!("{x:.3}")).collect();
    format!("[{}]", parts.join(", "))
}

fn random_phi<R: Rng>(rng: &mut R) -> MonotonePhi {
    match rng.random_range(0..4) {
        0 => MonotonePhi::constant(rng.random_range(0.2..5.0)).unwrap(),
        1 => MonotonePhi::shifted_arctan(rng.random_range(0.2..3.0), rng.random_range(0.0..2.0)).unwrap(),
        2 => MonotonePhi::soft_ramp(rng.random_range(0.2..3.0), rng.random_range(0.0..2.0)).unwrap(),
        _ => {
            let mut knots = vec![(-1.0, rng.random_range(0.2..1.0))];
            for k in 0..3 {
                let (x, y) = knots[k];
                knots.push((x + rng.random_range(0.1..1.0), y + rng.random_range(0.0..1.0)));
            }
            MonotonePhi::piecewise_linear(knots).unwrap()
        }
    }
}

#[test]
fn criterion_05_clock_identities() {
    let mut rng = rng_for(5, 0, StreamTag::RESAMPLE);
    let mut worst: f64 = 0.0;
    for i in 0..1000 {
        let phi = random_phi(&mut rng);
        let alpha = rng.random_range(0.2..0.9);
        let x = rng.random_range(-2.0..2.0);
        let params = StableParams::standard(alpha).unwrap();
        let z = sample_truncated_path(&params, 1.0, 0.01, &mut rng_for(5, i, StreamTag::DRIVER)).unwrap();
        worst = worst.max(clock_roundtrip_residual(&phi, x, &z, alpha).unwrap());
    }

    let mut exact = true;
    for _ in 0..1000 {
        let k = rng.random_range(1..50);
        let mut b = vec![0.0];
        for _ in 0..k {
            b.push(b.last().unwrap() + rng.random_range(1e-3..2.0));
        }
        let slopes: Vec<f64> = (0..k).map(|_| rng.random_range(0.01..10.0)).collect();
        let clock = Clock::from_slopes(b.clone(), slopes).unwrap();
        let unit = Clock::from_slopes(b.clone(), vec![1.0; k]).unwrap();
        for (i, &u) in b[..k].iter().enumerate() {
            exact &= clock.invert(clock.values()[i]) == ClockInverse::At(u);
            exact &= unit.values()[i].to_bits() == u.to_bits();
            exact &= unit.invert(u) == ClockInverse::At(u);
        }
        exact &= unit.total().to_bits() == b[k].to_bits();
    }
    report(
        5,
        worst <= C5_RESIDUAL && exact,
        format!("max round-trip residual {worst:.3e} over 1000 runs; breakpoint inversion exact: {exact}"),
    );
}

#[test]
fn criterion_06_coupled_distance_shrinks() {
    let params = StableParams::standard(C6_ALPHA).unwrap();
    let phi = arctan();
    let opts = SolverOptions::default();
    let eps = [0.1, 0.05, 0.025, 0.0125, 0.00625];
    let medians: Vec<f64> = eps
        .iter()
        .enumerate()
        .map(|(k, &e)| {
            let d: Vec<f64> = (0..C6_REPLICATES as u64)
                .map(|i| {
                    let mut rng = rng_for(6, i, StreamTag::level(k as u32));
                    coupled_pair_distance(&phi, 0.0, &params, C6_HORIZON, e, &mut rng, &opts).unwrap()
                })
                .collect();
            SampleSet::new(d).unwrap().median().unwrap()
        })
        .collect();
    let non_increasing = medians.windows(2).all(|w| w[1] <= w[0]);
    let ratio = medians[4] / medians[0];
    report(
        6,
        non_increasing && ratio < C6_RATIO,
        format!("alpha={C6_ALPHA}, T={C6_HORIZON}: medians {medians:?}, final/first {ratio:.4}"),
    );
}

#[test]
fn criterion_07_counterexample_scaling() {
    let mut p_values = Vec::new();
    let mut bound = 0.0;
    for seed in 0..SEEDS {
        let r = scaling_law_check(0.5, 0.5, 1.0, 2.0, C7_N, GRID_M, seed, &Sequential).unwrap();
        assert_eq!(r.exponent, 0.5);
        bound += r.mean_relative_head_bound / SEEDS as f64;
        p_values.push(r.ks.p_value);
    }
    let passing = p_values.iter().filter(|&&p| p > KS_LEVEL).count();
    report(
        7,
        passing >= 9,
        format!(
            "{passing}/10 seeds with p > {KS_LEVEL}, p = {}, mean relative head bound {bound:.4}",
            fmt_list(&p_values)
        ),
    );
}

#[test]
fn criteria_08_09_nonuniqueness_and_v_law() {
    let mut zero_residual: f64 = 0.0;
    let mut worst_positive: f64 = 1.0;
    let mut p_values = Vec::new();
    let mut worst_coverage: f64 = 1.0;
    for seed in 0..SEEDS {
        let samples = time_one_samples(0.5, 0.5, COUNTEREXAMPLE_HORIZON, C8_N, GRID_M, seed, &Sequential).unwrap();
        let nu = nonuniqueness_report(&samples);
        zero_residual = zero_residual.max(nu.zero_residual);
        worst_positive = worst_positive.min(nu.positive_fraction);
        let v = v_law_report(0.5, &samples, seed).unwrap();
        worst_coverage = worst_coverage.min(v.coverage);
        p_values.push(v.ks.p_value);
    }
    let c8 = zero_residual == 0.0 && worst_positive >= C8_POSITIVE;
    let passing = p_values.iter().filter(|&&p| p > KS_LEVEL).count();
    let c9 = passing >= C9_MIN_PASSING && worst_coverage >= C9_COVERAGE;
    let line8 = format!(
        "zero-solution residual {zero_residual}, min fraction of covered runs with X_1 > 0: {worst_positive:.4}"
    );
    let line9 = format!(
        "{passing}/10 seeds with p > {KS_LEVEL}, p = {}, min coverage {worst_coverage:.3}",
        fmt_list(&p_values)
    );
    // report both before asserting either
    let _ =
        std::io::stderr().write_all(format!("{} criterion  8: {line8}\n", if c8 { "PASS" } else { "FAIL" }).as_bytes());
    report(9, c9, line9);
    assert!(c8, "criterion 8 failed: {line8}");
}

fn experiment_configs() -> Vec<String> {
    vec![
        "experiment = \"strong-construct\"\nreplicates = 40\nalpha = 0.7\n".into(),
        "experiment = \"ladder-monotone\"\nreplicates = 100\nalpha = 0.7\n".into(),
        "experiment = \"weak-agree\"\nreplicates = 300\n".into(),
        format!("experiment = \"uniqueness-couple\"\nreplicates = 50\nalpha = 0.1\nT = 20\nphi = \"{ARCTAN}\"\ncutoffs = [0.1, 0.05, 0.025]\n"),
        "experiment = \"counterexample\"\nbeta = 0.5\nreplicates = 1000\ngrid_m = 200\ndivergence_times = [1, 4]\n".into(),
    ]
}

fn read_dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), std::fs::read(e.path()).unwrap())
        })
        .collect();
    files.sort();
    files
}

#[test]
fn criterion_10_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let mut identical = true;
    let mut files = 0;
    for (k, text) in experiment_configs().iter().enumerate() {
        let cfg = ExperimentConfig::from_toml(text).unwrap();
        let a = tmp.path().join(format!("{k}-a"));
        let b = tmp.path().join(format!("{k}-b"));
        run_experiment(&cfg, &a, &Sequential).unwrap();
        run_experiment(&cfg, &b, &RayonReplicator::new(3).unwrap()).unwrap();
        let (fa, fb) = (read_dir_bytes(&a), read_dir_bytes(&b));
        files += fa.len();
        identical &= !fa.is_empty() && fa == fb;
    }
    report(
        10,
        identical,
        format!("5 experiments, {files} files byte-identical across repeated runs (1 vs 3 threads): {identical}"),
    );
}
