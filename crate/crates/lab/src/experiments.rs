//! The five canonical experiments.
//!
//! Each one writes its CSV artifacts into the output directory, plus
//! `summary.csv` with one row per check. Replicate `i` always draws from
//! `derive_seed(seed, i, tag)`, so results do not depend on the replicate
//! count of other levels or on the thread count.

use std::path::Path;

use stable_sde_core::counterexample::{
    divergence_check, nonuniqueness_report, run_counterexample, scaling_law_check, time_one_samples, v_law_report,
};
use stable_sde_core::driver::sample_truncated_path;
use stable_sde_core::stats::ks_two_sample;
use stable_sde_core::time_change::{clock_roundtrip_residual, time_change_run};
use stable_sde_core::truncation::{build_ladder, coupled_pair_distance, replay_mismatches, solve_truncated};
use stable_sde_core::{
    derive_seed, rng_for, CounterexampleConfig, CounterexampleError, DriverError, Replicator, SampleSet, SolveError,
    SolverOptions, StableParams, StatsError, StreamTag, TimeChangeError,
};
use thiserror::Error;

use crate::config::{ConfigError, Experiment, ExperimentConfig};
use crate::output::{self, num, opt, write_table};

/// Largest accepted `|τ(B(u)) - u|` over a time-change run.
pub const ROUNDTRIP_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum LabError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("replicate {replicate} (seed {seed:#018x}): {source}")]
    Replicate { replicate: usize, seed: u64, source: Box<dyn std::error::Error + Send + Sync> },
    #[error(transparent)]
    Solve(#[from] SolveError),
    #[error(transparent)]
    TimeChange(#[from] TimeChangeError),
    #[error(transparent)]
    Counterexample(#[from] CounterexampleError),
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

impl LabError {
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config(_) => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// Reported only.
    Info,
    /// A Monte Carlo verdict; failing gives exit code 1.
    Statistical,
    /// Must hold on every replicate; failing gives exit code 2.
    Invariant,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub threshold: Option<f64>,
    pub pass: bool,
    pub kind: CheckKind,
}

impl Check {
    fn info(name: impl Into<String>, value: f64) -> Self {
        Self { name: name.into(), value, threshold: None, pass: true, kind: CheckKind::Info }
    }

    fn above(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: Some(threshold),
            pass: value > threshold,
            kind: CheckKind::Statistical,
        }
    }

    fn at_least(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: Some(threshold),
            pass: value >= threshold,
            kind: CheckKind::Statistical,
        }
    }

    fn below(name: impl Into<String>, value: f64, threshold: f64) -> Self {
        Self {
            name: name.into(),
            value,
            threshold: Some(threshold),
            pass: value < threshold,
            kind: CheckKind::Statistical,
        }
    }

    fn flag(name: impl Into<String>, ok: bool) -> Self {
        Self {
            name: name.into(),
            value: if ok { 1.0 } else { 0.0 },
            threshold: Some(1.0),
            pass: ok,
            kind: CheckKind::Statistical,
        }
    }

    fn invariant(name: impl Into<String>, value: f64, limit: f64) -> Self {
        Self { name: name.into(), value, threshold: Some(limit), pass: value <= limit, kind: CheckKind::Invariant }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub experiment: Experiment,
    pub checks: Vec<Check>,
    /// Human-readable failure notes naming the violated check and, where one
    /// is responsible, the replicate and its seed.
    pub failures: Vec<String>,
}

impl Outcome {
    /// 0 when everything passes, 1 on a statistical failure, 2 on an
    /// invariant violation.
    pub fn exit_code(&self) -> i32 {
        let failed = |k| self.checks.iter().any(|c| c.kind == k && !c.pass);
        if failed(CheckKind::Invariant) {
            2
        } else if failed(CheckKind::Statistical) {
            1
        } else {
            0
        }
    }
}

fn params(cfg: &ExperimentConfig) -> Result<StableParams, DriverError> {
    match cfg.c {
        Some(c) => StableParams::new(cfg.alpha, c),
        None => StableParams::standard(cfg.alpha),
    }
}

/// Collects per-replicate results, tagging the first error with its seed.
fn gather<T, E>(results: Vec<Result<T, E>>, master: u64, tag: StreamTag) -> Result<Vec<T>, LabError>
where
    E: std::error::Error + Send + Sync + 'static,
{
    let mut out = Vec::with_capacity(results.len());
    for (replicate, r) in results.into_iter().enumerate() {
        match r {
            Ok(v) => out.push(v),
            Err(e) => {
                let seed = derive_seed(master, replicate as u64, tag);
                return Err(LabError::Replicate { replicate, seed, source: Box::new(e) });
            }
        }
    }
    Ok(out)
}

fn median(values: &[f64]) -> Result<f64, StatsError> {
    SampleSet::new(values.to_vec())?.median()
}

/// Runs the configured experiment and writes its artifacts into `out`.
pub fn run_experiment<P: Replicator>(cfg: &ExperimentConfig, out: &Path, rep: &P) -> Result<Outcome, LabError> {
    cfg.validate()?;
    std::fs::create_dir_all(out)?;
    let mut outcome = Outcome { experiment: cfg.experiment, checks: Vec::new(), failures: Vec::new() };
    match cfg.experiment {
        Experiment::StrongConstruct | Experiment::LadderMonotone => ladder_experiment(cfg, out, rep, &mut outcome)?,
        Experiment::WeakAgree => weak_agree(cfg, out, rep, &mut outcome)?,
        Experiment::UniquenessCouple => uniqueness_couple(cfg, out, rep, &mut outcome)?,
        Experiment::Counterexample => counterexample(cfg, out, rep, &mut outcome)?,
    }
    for c in outcome.checks.iter().filter(|c| !c.pass) {
        let limit = c.threshold.map(|t| format!(" (threshold {t})")).unwrap_or_default();
        outcome.failures.push(format!("check `{}` failed: value {}{limit}", c.name, c.value));
    }
    write_table(
        &out.join("summary.csv"),
        &["name", "value", "threshold", "pass"],
        outcome.checks.iter().map(|c| vec![c.name.clone(), num(c.value), opt(c.threshold), c.pass.to_string()]),
    )?;
    Ok(outcome)
}

struct LadderStats {
    mismatches: usize,
    violations: Vec<(usize, usize, f64)>,
    guard_hits: usize,
    terminals: Vec<f64>,
}

/// strong-construct and ladder-monotone: solve every cutoff on thinnings of
/// one base path per replicate.
fn ladder_experiment<P: Replicator>(
    cfg: &ExperimentConfig,
    out: &Path,
    rep: &P,
    outcome: &mut Outcome,
) -> Result<(), LabError> {
    let phi = cfg.phi()?;
    let params = params(cfg)?;
    let opts = SolverOptions::default();
    let tag = StreamTag::DRIVER;
    let run = |i: usize| {
        let mut rng = rng_for(cfg.seed, i as u64, tag);
        build_ladder(&phi, cfg.x0, &params, cfg.horizon, &cfg.cutoffs, &mut rng, &opts)
    };
    let stats = gather(
        rep.map(cfg.replicates, |i| {
            run(i).map(|ladder| {
                let finest = ladder.levels().last().unwrap();
                LadderStats {
                    mismatches: replay_mismatches(&phi, finest, ladder.base()),
                    violations: ladder.violations(),
                    guard_hits: ladder.guard_hits(),
                    terminals: ladder.levels().iter().map(|l| l.terminal()).collect(),
                }
            })
        }),
        cfg.seed,
        tag,
    )?;

    let first = run(0)?;
    output::write_ladder(&out.join("ladder.csv"), &cfg.cutoffs, first.levels())?;
    if cfg.experiment == Experiment::StrongConstruct {
        output::write_driver(&out.join("driver.csv"), first.base())?;
        output::write_solution(&out.join("solution.csv"), first.levels().last().unwrap())?;
    }

    let violations: usize = stats.iter().map(|s| s.violations.len()).sum();
    for (i, s) in stats.iter().enumerate().filter(|(_, s)| !s.violations.is_empty()).take(5) {
        let (j, k, t) = s.violations[0];
        outcome.failures.push(format!(
            "ladder dominance violated in replicate {i} (seed {:#018x}): eps {} above eps {} at t = {t}",
            derive_seed(cfg.seed, i as u64, tag),
            cfg.cutoffs[j],
            cfg.cutoffs[k],
        ));
    }
    if cfg.experiment == Experiment::StrongConstruct {
        let mismatches: usize = stats.iter().map(|s| s.mismatches).sum();
        outcome.checks.push(Check::invariant("replay_mismatches", mismatches as f64, 0.0));
    }
    outcome.checks.push(Check::invariant("ladder_violations", violations as f64, 0.0));
    outcome.checks.push(Check::info("guard_hits", stats.iter().map(|s| s.guard_hits).sum::<usize>() as f64));
    for (k, &eps) in cfg.cutoffs.iter().enumerate() {
        let xs: Vec<f64> = stats.iter().map(|s| s.terminals[k]).collect();
        outcome.checks.push(Check::info(format!("median_x_T_eps_{eps}"), median(&xs)?));
    }
    outcome.checks.push(Check::info("replicates", cfg.replicates as f64));
    Ok(())
}

/// weak-agree: `X_T` from the truncation solver against the time change
/// driven by an independent path.
fn weak_agree<P: Replicator>(
    cfg: &ExperimentConfig,
    out: &Path,
    rep: &P,
    outcome: &mut Outcome,
) -> Result<(), LabError> {
    let phi = cfg.phi()?;
    let params = params(cfg)?;
    let opts = SolverOptions::default();
    let driver_horizon = cfg.driver_horizon()?;
    let truncated = gather(
        rep.map(cfg.replicates, |i| {
            let mut rng = rng_for(cfg.seed, i as u64, StreamTag::DRIVER);
            let z = sample_truncated_path(&params, cfg.horizon, cfg.eps, &mut rng)?;
            solve_truncated(&phi, cfg.x0, &z, &opts).map(|s| s.terminal())
        }),
        cfg.seed,
        StreamTag::DRIVER,
    )?;
    let changed = gather(
        rep.map(cfg.replicates, |i| -> Result<(Option<f64>, f64), LabError> {
            let mut rng = rng_for(cfg.seed, i as u64, StreamTag::ALT_DRIVER);
            let z = sample_truncated_path(&params, driver_horizon, cfg.eps, &mut rng)?;
            let run = time_change_run(&phi, cfg.x0, &z, cfg.alpha)?;
            let x = run.solution.value(cfg.horizon).ok();
            let residual = clock_roundtrip_residual(&phi, cfg.x0, &z, cfg.alpha)?;
            Ok((x, residual))
        }),
        cfg.seed,
        StreamTag::ALT_DRIVER,
    )?;

    {
        let mut rng = rng_for(cfg.seed, 0, StreamTag::ALT_DRIVER);
        let z = sample_truncated_path(&params, driver_horizon, cfg.eps, &mut rng)?;
        let run = time_change_run(&phi, cfg.x0, &z, cfg.alpha)?;
        output::write_driver(&out.join("driver.csv"), &z)?;
        output::write_clock(&out.join("clock.csv"), &run.clock)?;
        output::write_solution(&out.join("solution.csv"), &run.solution)?;
    }

    let covered: Vec<f64> = changed.iter().filter_map(|c| c.0).collect();
    let coverage = covered.len() as f64 / cfg.replicates as f64;
    let residual = changed.iter().map(|c| c.1).fold(0.0, f64::max);
    if let Some(i) = changed.iter().position(|c| c.1 > ROUNDTRIP_TOLERANCE) {
        outcome.failures.push(format!(
            "clock round trip off by {} in replicate {i} (seed {:#018x})",
            changed[i].1,
            derive_seed(cfg.seed, i as u64, StreamTag::ALT_DRIVER)
        ));
    }
    let ks = ks_two_sample(&SampleSet::new(truncated)?, &SampleSet::new(covered)?)?;
    write_table(
        &out.join("report.csv"),
        &REPORT_HEADER,
        [report_row("weak_agree", ks.statistic, Some(ks.p_value), coverage, ks.n + ks.m, cfg, None, None)],
    )?;
    outcome.checks.push(Check::above("ks_p_value", ks.p_value, cfg.ks_threshold));
    outcome.checks.push(Check::info("ks_statistic", ks.statistic));
    outcome.checks.push(Check::at_least("coverage", coverage, cfg.coverage_threshold));
    outcome.checks.push(Check::invariant("clock_roundtrip_residual", residual, ROUNDTRIP_TOLERANCE));
    Ok(())
}

/// uniqueness-couple: medians of the coupled sup-distance as the cutoff is
/// refined.
fn uniqueness_couple<P: Replicator>(
    cfg: &ExperimentConfig,
    out: &Path,
    rep: &P,
    outcome: &mut Outcome,
) -> Result<(), LabError> {
    let phi = cfg.phi()?;
    let params = params(cfg)?;
    let opts = SolverOptions::default();
    let mut medians = Vec::with_capacity(cfg.cutoffs.len());
    for (k, &eps) in cfg.cutoffs.iter().enumerate() {
        let tag = StreamTag::level(k as u32);
        let d = gather(
            rep.map(cfg.replicates, |i| {
                let mut rng = rng_for(cfg.seed, i as u64, tag);
                coupled_pair_distance(&phi, cfg.x0, &params, cfg.horizon, eps, &mut rng, &opts)
            }),
            cfg.seed,
            tag,
        )?;
        medians.push(median(&d)?);
    }
    write_table(
        &out.join("couple.csv"),
        &["eps", "median"],
        cfg.cutoffs.iter().zip(&medians).map(|(&e, &m)| vec![num(e), num(m)]),
    )?;
    for (&eps, &m) in cfg.cutoffs.iter().zip(&medians) {
        outcome.checks.push(Check::info(format!("median_distance_eps_{eps}"), m));
    }
    outcome.checks.push(Check::flag("median_non_increasing", medians.windows(2).all(|w| w[1] <= w[0])));
    if medians.len() > 1 {
        let ratio = medians[medians.len() - 1] / medians[0];
        outcome.checks.push(Check::below("final_over_first_median", ratio, cfg.ratio_threshold));
    }
    Ok(())
}

const REPORT_HEADER: [&str; 9] = ["check", "statistic", "p_value", "coverage", "n", "alpha", "beta", "grid_m", "seed"];

#[allow(clippy::too_many_arguments)]
fn report_row(
    check: &str,
    statistic: f64,
    p_value: Option<f64>,
    coverage: f64,
    n: usize,
    cfg: &ExperimentConfig,
    beta: Option<f64>,
    grid_m: Option<usize>,
) -> Vec<String> {
    vec![
        check.to_string(),
        num(statistic),
        opt(p_value),
        num(coverage),
        n.to_string(),
        num(cfg.alpha),
        opt(beta),
        grid_m.map(|m| m.to_string()).unwrap_or_default(),
        cfg.seed.to_string(),
    ]
}

/// counterexample: scaling law, law of `V_1`, the two solutions from zero,
/// and optionally the divergence curve.
fn counterexample<P: Replicator>(
    cfg: &ExperimentConfig,
    out: &Path,
    rep: &P,
    outcome: &mut Outcome,
) -> Result<(), LabError> {
    let beta = cfg.beta()?;
    let (alpha, n, m, seed) = (cfg.alpha, cfg.replicates, cfg.grid_m, cfg.seed);
    let horizon = cfg.driver_horizon()?;
    let row = |check: &str, stat: f64, p: Option<f64>, coverage: f64, count: usize| {
        report_row(check, stat, p, coverage, count, cfg, Some(beta), Some(m))
    };

    let scaling = scaling_law_check(alpha, beta, cfg.t1, cfg.t2, n, m, seed, rep)?;
    let samples = time_one_samples(alpha, beta, horizon, n, m, seed, rep)?;
    let vlaw = v_law_report(alpha, &samples, seed)?;
    let nonunique = nonuniqueness_report(&samples);
    let mut rows = vec![
        row("scaling", scaling.ks.statistic, Some(scaling.ks.p_value), 1.0, n),
        row("v_law", vlaw.ks.statistic, Some(vlaw.ks.p_value), vlaw.coverage, n),
        row("nonuniqueness", nonunique.positive_fraction, None, nonunique.coverage, n),
    ];
    let divergence = if cfg.divergence_times.is_empty() {
        None
    } else {
        let d = divergence_check(alpha, beta, &cfg.divergence_times, cfg.divergence_level, n, m, seed, rep)?;
        for p in &d.points {
            rows.push(row(&format!("divergence_t_{}", p.t), p.probability, None, 1.0, n));
        }
        Some(d)
    };
    write_table(&out.join("report.csv"), &REPORT_HEADER, rows)?;

    // replicate 0 on the full horizon
    let run_cfg = CounterexampleConfig::new(alpha, beta, horizon, m);
    let run = run_counterexample(&run_cfg, &mut rng_for(seed, 0, StreamTag::DRIVER))?;
    output::write_grid(&out.join("grid.csv"), run.step(), run.z())?;
    output::write_clock(&out.join("clock.csv"), run.clock())?;
    let jumps = (1..run.z().len()).map(|i| {
        let b = run.clock().values()[i];
        vec![num(b), num(run.z()[i - 1]), num(run.z()[i])]
    });
    write_table(&out.join("solution.csv"), &["t", "x_pre", "x_post"], jumps)?;

    if let Some(i) = samples.iter().position(|s| s.zero_residual != 0.0) {
        outcome.failures.push(format!(
            "zero path fails the equation in replicate {i} (seed {:#018x})",
            derive_seed(seed, i as u64, StreamTag::DRIVER)
        ));
    }
    if vlaw.inconclusive {
        outcome
            .failures
            .push(format!("v-law check inconclusive: coverage {} below 1/2; raise driver_horizon", vlaw.coverage));
    }
    let checks = &mut outcome.checks;
    checks.push(Check::info("scaling_exponent", scaling.exponent));
    checks.push(Check::above("scaling_ks_p_value", scaling.ks.p_value, cfg.ks_threshold));
    checks.push(Check::info("scaling_mean_relative_head_bound", scaling.mean_relative_head_bound));
    checks.push(Check::above("v_law_ks_p_value", vlaw.ks.p_value, cfg.ks_threshold));
    checks.push(Check::at_least("v_law_coverage", vlaw.coverage, cfg.coverage_threshold));
    checks.push(Check::info("v_law_mean_relative_head_bound", vlaw.mean_relative_head_bound));
    checks.push(Check::info("two_way_residual_max", vlaw.max_two_way_residual));
    checks.push(Check::at_least("positive_fraction", nonunique.positive_fraction, cfg.positive_threshold));
    checks.push(Check::invariant("zero_solution_residual", nonunique.zero_residual, 0.0));
    if let Some(d) = divergence {
        checks.push(Check::flag("divergence_non_increasing", d.non_increasing));
        checks.push(Check::info("divergence_strictly_decreasing", if d.strictly_decreasing { 1.0 } else { 0.0 }));
    }
    Ok(())
}
