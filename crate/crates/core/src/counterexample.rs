//! The degenerate coefficient `φ(x) = x^β`, `β ∈ (0, 1)`, started at zero.
//!
//! Here `dX = φ(X_-) dV`, `X_0 = 0` has two solutions: `X ≡ 0`, and the
//! time change `X_t = Z_{γ_t}` where `γ` inverts the singular clock
//! `B_t = ∫_0^t Z_{s-}^{-αβ} ds` and `V_t = Y_{γ_t}` with
//! `Y_t = ∫_0^t φ(Z_{s-})^{-1} dZ_s`. `V` is again a stable subordinator.
//!
//! Truncating small jumps would leave `Z = 0` on an initial interval and make
//! `B` infinite there, so `Z` is simulated from exact increments on a
//! uniform grid instead and treated as piecewise constant between grid
//! points (left endpoints, i.e. `Z_{s-}`). The integrand blows up at the
//! origin; the contribution of the first cell `[0, s_1]` is estimated
//! separately from the Riemann sum by fitting `C s^{1-β}` to the partial
//! sums over the first ten grid points.

use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::clock::{Clock, ClockError, ClockInverse};
use crate::driver::{sample_exact_increment, DriverError, IncrementSampler, StableParams};
use crate::seed::{rng_for, Replicator, StreamTag};
use crate::stats::{ks_two_sample, KsReport, SampleSet, StatsError};

/// Smallest accepted grid resolution (points per unit time).
pub const MIN_GRID_PER_UNIT: usize = 100;
/// Smallest accepted replicate count for the distributional checks.
pub const MIN_REPLICATES: usize = 1000;
/// Grid points used for the head fit.
const HEAD_FIT_POINTS: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CounterexampleError {
    #[error("stable order must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("β must lie in the open interval (0, 1), got {0}")]
    InvalidBeta(f64),
    #[error("grid needs at least {MIN_GRID_PER_UNIT} points per unit time and {HEAD_FIT_POINTS} steps in total, got {0} per unit")]
    GridTooCoarse(usize),
    #[error("horizon must be positive and finite, got {0}")]
    InvalidHorizon(f64),
    #[error("grid value {value} at step {index} is not positive: sampler integrity failure")]
    SamplerIntegrity { index: usize, value: f64 },
    #[error("need at least {MIN_REPLICATES} replicates, got {0}")]
    TooFewReplicates(usize),
    #[error("evaluation times must be positive, finite and ordered")]
    InvalidTimes,
    #[error(transparent)]
    Driver(#[from] DriverError),
    #[error(transparent)]
    Clock(#[from] ClockError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

/// Parameters of one simulated counterexample path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleConfig {
    pub alpha: f64,
    pub beta: f64,
    /// Simulated horizon of `Z`.
    pub horizon: f64,
    /// Grid points per unit time.
    pub grid_per_unit: usize,
    /// Stop sampling once the clock exceeds this value. Values of the run
    /// before the stop are identical to those of the full-horizon run.
    pub stop_after_clock: Option<f64>,
    /// Accumulate `Y` (and hence `V`).
    pub track_y: bool,
}

impl CounterexampleConfig {
    pub fn new(alpha: f64, beta: f64, horizon: f64, grid_per_unit: usize) -> Self {
        Self { alpha, beta, horizon, grid_per_unit, stop_after_clock: None, track_y: true }
    }

    fn validate(&self) -> Result<usize, CounterexampleError> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CounterexampleError::InvalidAlpha(self.alpha));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(CounterexampleError::InvalidBeta(self.beta));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(CounterexampleError::InvalidHorizon(self.horizon));
        }
        let steps = libm::round(self.horizon * self.grid_per_unit as f64) as usize;
        if self.grid_per_unit < MIN_GRID_PER_UNIT || steps < HEAD_FIT_POINTS {
            return Err(CounterexampleError::GridTooCoarse(self.grid_per_unit));
        }
        Ok(steps)
    }

    fn step(&self, steps: usize) -> f64 {
        self.horizon / steps as f64
    }
}

/// Least-squares fit of `I(s) = C s^{1-β}` to the partial sums
/// `R_k ≈ I(s_k) - I(s_1)`, returning the head `I(s_1) = C s_1^{1-β}`.
///
/// With `s_k = k s_1` the step cancels: head `= Σ R_k e_k / Σ e_k²`,
/// `e_k = k^{1-β} - 1`.
fn head_estimate(partial: &[f64], beta: f64) -> f64 {
    let (num, den) = (2..partial.len()).fold((0.0, 0.0), |(num, den), k| {
        let e = libm::pow(k as f64, 1.0 - beta) - 1.0;
        (num + partial[k] * e, den + e * e)
    });
    num / den
}

/// Streaming left-endpoint accumulation of `∫ Z_{s-}^{-αβ} ds` on the grid.
struct ClockAccumulator {
    step: f64,
    exponent: f64,
    steps: usize,
    riemann: f64,
    partial: [f64; HEAD_FIT_POINTS + 1],
    g_first: f64,
    g_last: f64,
    head: Option<f64>,
    beta: f64,
}

impl ClockAccumulator {
    fn new(step: f64, alpha: f64, beta: f64) -> Self {
        Self {
            step,
            exponent: -alpha * beta,
            steps: 0,
            riemann: 0.0,
            partial: [0.0; HEAD_FIT_POINTS + 1],
            g_first: 0.0,
            g_last: 0.0,
            head: None,
            beta,
        }
    }

    /// Absorbs `Z_{s_k}` for the next `k` and returns the slope `Z_{s_k}^{-αβ}`.
    #[inline]
    fn push(&mut self, z: f64) -> Result<f64, CounterexampleError> {
        self.steps += 1;
        let k = self.steps;
        if !(z > 0.0) {
            return Err(CounterexampleError::SamplerIntegrity { index: k, value: z });
        }
        if k >= 2 {
            self.riemann += self.g_last * self.step;
        }
        if k <= HEAD_FIT_POINTS {
            self.partial[k] = self.riemann;
        }
        let g = libm::pow(z, self.exponent);
        if k == 1 {
            self.g_first = g;
        }
        self.g_last = g;
        if k == HEAD_FIT_POINTS {
            self.head = Some(head_estimate(&self.partial, self.beta));
        }
        Ok(g)
    }

    /// Clock value at the latest grid point, once the head is known.
    fn value(&self) -> Option<f64> {
        self.head.map(|h| h + self.riemann)
    }

    /// Spread between left- and right-endpoint sums over `[s_1, s_k]`:
    /// `Z` is non-decreasing, so the telescoped gap `h (g_1 - g_k)` brackets
    /// the grid integral.
    fn riemann_width(&self) -> f64 {
        self.step * (self.g_first - self.g_last)
    }
}

/// One simulated counterexample path with its clock and derived processes.
#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleRun {
    pub alpha: f64,
    pub beta: f64,
    /// `Z` at `s_i = i·step`, `i = 0..=k` (`k` smaller than the horizon's
    /// step count when sampling stopped early).
    z: Vec<f64>,
    /// `Ŷ` at the grid points; empty unless `Y` was tracked.
    y: Vec<f64>,
    /// `B` with breakpoints at the grid points.
    clock: Clock,
    step: f64,
    head: f64,
    riemann_width: f64,
}

impl CounterexampleRun {
    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn clock(&self) -> &Clock {
        &self.clock
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    /// First grid time `s_1`.
    pub fn first_grid_time(&self) -> f64 {
        self.step
    }

    /// Estimated `∫_0^{s_1} Z_s^{-αβ} ds`.
    pub fn head(&self) -> f64 {
        self.head
    }

    /// Uncertainty attached to the clock value: the head correction plus the
    /// left/right Riemann spread.
    pub fn head_bound(&self) -> f64 {
        self.head + self.riemann_width
    }

    /// `B` at the last simulated grid time.
    pub fn clock_total(&self) -> f64 {
        self.clock.total()
    }

    /// `γ_t`, the right inverse of `B`.
    pub fn gamma(&self, t: f64) -> ClockInverse {
        self.clock.invert(t)
    }

    fn grid_index(&self, t: f64) -> Option<usize> {
        let s = self.gamma(t).at()?;
        Some(self.clock.breakpoints().partition_point(|&b| b <= s) - 1)
    }

    /// `X_t = Z_{γ_t}`, or `None` past the simulated clock.
    pub fn x_at(&self, t: f64) -> Option<f64> {
        self.grid_index(t).map(|i| self.z[i])
    }

    /// `V_t = Y_{γ_t}`, or `None` past the simulated clock or without `Y`.
    pub fn v_at(&self, t: f64) -> Option<f64> {
        let i = self.grid_index(t)?;
        self.y.get(i).copied()
    }

    /// Index of the last grid point mapped to a time `<= t` (all of them
    /// when the clock does not reach `t`).
    fn last_index(&self, t: f64) -> usize {
        self.grid_index(t).unwrap_or(self.z.len() - 1)
    }

    /// Residual `Σ |ΔX - φ(X_-) ΔV|` of the zero path over every mapped jump
    /// of `V` up to time `t`. Exactly zero because `φ(0) = 0`.
    pub fn zero_solution_residual(&self, t: f64) -> f64 {
        let phi_zero = libm::pow(0.0, self.beta);
        let last = self.last_index(t);
        self.y[..=last].windows(2).map(|w| (0.0 - phi_zero * (w[1] - w[0])).abs()).sum()
    }

    /// Largest relative gap, up to time `t`, between `X = Z_γ` and the path
    /// obtained by stepping `X ← X + X^β ΔV` through the mapped jumps of `V`
    /// from the first non-zero grid value.
    pub fn two_way_residual(&self, t: f64) -> f64 {
        let last = self.last_index(t);
        if last < 2 || self.y.is_empty() {
            return 0.0;
        }
        let mut x = self.z[1];
        let mut worst: f64 = 0.0;
        for i in 2..=last {
            x += libm::pow(x, self.beta) * (self.y[i] - self.y[i - 1]);
            worst = worst.max((x - self.z[i]).abs() / self.z[i]);
        }
        worst
    }
}

/// Simulates `Z` on the grid and builds `B`, `γ`, `X` and (optionally) `Y`, `V`.
pub fn run_counterexample<R: Rng + ?Sized>(
    cfg: &CounterexampleConfig,
    rng: &mut R,
) -> Result<CounterexampleRun, CounterexampleError> {
    let steps = cfg.validate()?;
    let step = cfg.step(steps);
    let params = StableParams::standard(cfg.alpha)?;
    let sampler = IncrementSampler::new(&params, step)?;
    let mut acc = ClockAccumulator::new(step, cfg.alpha, cfg.beta);

    let capacity = match cfg.stop_after_clock {
        Some(_) => steps.min(1 << 14),
        None => steps,
    } + 1;
    let mut z = Vec::with_capacity(capacity);
    let mut slopes = Vec::with_capacity(capacity);
    let mut y = Vec::with_capacity(if cfg.track_y { capacity } else { 0 });
    z.push(0.0);
    slopes.push(f64::NAN); // head slope, set once the head is fitted
    if cfg.track_y {
        y.push(0.0);
    }
    let one_minus_beta = 1.0 - cfg.beta;
    let mut current = 0.0;
    for k in 1..=steps {
        current += sampler.sample(rng);
        let g = acc.push(current)?;
        if cfg.track_y {
            let next = if k == 1 {
                // ∫_0^{s_1} Z^{-β} dZ, taken as for a continuous path
                libm::pow(current, one_minus_beta) / one_minus_beta
            } else {
                let prev = z[k - 1];
                y[k - 1] + (current - prev) * libm::pow(prev, -cfg.beta)
            };
            y.push(next);
        }
        z.push(current);
        if k < steps {
            slopes.push(g);
        }
        if let (Some(target), Some(b)) = (cfg.stop_after_clock, acc.value()) {
            if b > target {
                break;
            }
        }
    }
    let k = z.len() - 1;
    slopes.truncate(k);
    let head = acc.head.expect("validated step count covers the head fit");
    slopes[0] = head / step;
    let breakpoints: Vec<f64> = (0..=k).map(|i| i as f64 * step).collect();
    let clock = Clock::from_slopes(breakpoints, slopes)?;
    Ok(CounterexampleRun {
        alpha: cfg.alpha,
        beta: cfg.beta,
        z,
        y,
        clock,
        step,
        head,
        riemann_width: acc.riemann_width(),
    })
}

/// Clock value `B_T` for one freshly simulated path, without storing it.
///
/// Returns `(B_T, head bound)`. With `stop_above`, sampling ends as soon as
/// the clock exceeds that value and the partial clock is returned.
pub fn sample_clock_total<R: Rng + ?Sized>(
    alpha: f64,
    beta: f64,
    horizon: f64,
    grid_per_unit: usize,
    stop_above: Option<f64>,
    rng: &mut R,
) -> Result<(f64, f64), CounterexampleError> {
    let cfg = CounterexampleConfig {
        stop_after_clock: stop_above,
        track_y: false,
        ..CounterexampleConfig::new(alpha, beta, horizon, grid_per_unit)
    };
    let steps = cfg.validate()?;
    let step = cfg.step(steps);
    let params = StableParams::standard(alpha)?;
    let sampler = IncrementSampler::new(&params, step)?;
    let mut acc = ClockAccumulator::new(step, alpha, beta);
    let mut z = 0.0;
    for _ in 0..steps {
        z += sampler.sample(rng);
        acc.push(z)?;
        if let (Some(limit), Some(b)) = (stop_above, acc.value()) {
            if b > limit {
                break;
            }
        }
    }
    // The last slope only matters beyond the final grid point.
    let b = acc.value().expect("validated step count covers the head fit");
    Ok((b, acc.head.unwrap_or(0.0) + acc.riemann_width()))
}

/// Clock value at the end of an externally supplied grid path of `Z`.
pub fn clock_total_from_grid(
    values: &[f64],
    step: f64,
    alpha: f64,
    beta: f64,
) -> Result<(f64, f64), CounterexampleError> {
    if values.len() <= HEAD_FIT_POINTS {
        return Err(CounterexampleError::GridTooCoarse(values.len()));
    }
    let mut acc = ClockAccumulator::new(step, alpha, beta);
    for &z in &values[1..] {
        acc.push(z)?;
    }
    Ok((acc.value().unwrap(), acc.head.unwrap() + acc.riemann_width()))
}

fn check_exponents(alpha: f64, beta: f64) -> Result<(), CounterexampleError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(CounterexampleError::InvalidAlpha(alpha));
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(CounterexampleError::InvalidBeta(beta));
    }
    Ok(())
}

fn collect<T>(results: Vec<Result<T, CounterexampleError>>) -> Result<Vec<T>, CounterexampleError> {
    results.into_iter().collect()
}

/// Distributional comparison of `B_{t2} (t2/t1)^{β-1}` with `B_{t1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingReport {
    pub ks: KsReport,
    /// The exponent `1 - β` used for rescaling.
    pub exponent: f64,
    /// Mean head bound relative to the clock value, over both samples.
    pub mean_relative_head_bound: f64,
}

/// Scaling-law check on independent replicates at the two times.
#[allow(clippy::too_many_arguments)]
pub fn scaling_law_check<P: Replicator>(
    alpha: f64,
    beta: f64,
    t1: f64,
    t2: f64,
    n: usize,
    grid_per_unit: usize,
    master_seed: u64,
    replicator: &P,
) -> Result<ScalingReport, CounterexampleError> {
    check_exponents(alpha, beta)?;
    if !(t1 > 0.0 && t2 >= t1 && t2.is_finite()) {
        return Err(CounterexampleError::InvalidTimes);
    }
    if n < MIN_REPLICATES {
        return Err(CounterexampleError::TooFewReplicates(n));
    }
    let factor = libm::pow(t2 / t1, beta - 1.0);
    let sample = |t: f64, tag: StreamTag, scale: f64| {
        collect(replicator.map(n, |i| {
            let mut rng = rng_for(master_seed, i as u64, tag);
            sample_clock_total(alpha, beta, t, grid_per_unit, None, &mut rng).map(|(b, bound)| (b * scale, bound / b))
        }))
    };
    let first = sample(t1, StreamTag::level(0), 1.0)?;
    let second = sample(t2, StreamTag::level(1), factor)?;
    let rel = first.iter().chain(&second).map(|p| p.1).sum::<f64>() / (2 * n) as f64;
    let a = SampleSet::new(first.into_iter().map(|p| p.0).collect())?;
    let b = SampleSet::new(second.into_iter().map(|p| p.0).collect())?;
    Ok(ScalingReport { ks: ks_two_sample(&a, &b)?, exponent: 1.0 - beta, mean_relative_head_bound: rel })
}

/// One point of the divergence curve `t ↦ P(B_t <= M)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DivergencePoint {
    pub t: f64,
    pub probability: f64,
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivergenceReport {
    pub level: f64,
    pub points: Vec<DivergencePoint>,
    /// Every step down the curve is non-increasing within 2 standard errors.
    pub non_increasing: bool,
    /// Every step decreases by more than 2 standard errors.
    pub strictly_decreasing: bool,
}

/// Empirical `P(B_t <= level)` on an increasing grid of times.
#[allow(clippy::too_many_arguments)]
pub fn divergence_check<P: Replicator>(
    alpha: f64,
    beta: f64,
    times: &[f64],
    level: f64,
    n: usize,
    grid_per_unit: usize,
    master_seed: u64,
    replicator: &P,
) -> Result<DivergenceReport, CounterexampleError> {
    check_exponents(alpha, beta)?;
    let ordered = times.windows(2).all(|w| w[1] > w[0]);
    if times.is_empty() || !ordered || !(times[0] > 0.0) || !times.iter().all(|t| t.is_finite()) || level.is_nan() {
        return Err(CounterexampleError::InvalidTimes);
    }
    let mut points = Vec::with_capacity(times.len());
    for (k, &t) in times.iter().enumerate() {
        let hits = collect(replicator.map(n, |i| {
            let mut rng = rng_for(master_seed, i as u64, StreamTag::level(k as u32));
            // B only grows, so the run can stop once it passes the level.
            let stop = if level.is_finite() { Some(level.max(0.0)) } else { None };
            sample_clock_total(alpha, beta, t, grid_per_unit, stop, &mut rng).map(|(b, _)| b <= level)
        }))?;
        let p = hits.iter().filter(|&&h| h).count() as f64 / n as f64;
        points.push(DivergencePoint { t, probability: p, std_error: libm::sqrt(p * (1.0 - p) / n as f64) });
    }
    let gaps = points.windows(2).map(|w| {
        let se = libm::sqrt(w[0].std_error * w[0].std_error + w[1].std_error * w[1].std_error);
        (w[0].probability - w[1].probability, se)
    });
    let non_increasing = gaps.clone().all(|(d, se)| d >= -2.0 * se);
    let strictly_decreasing = gaps.clone().all(|(d, se)| d > 2.0 * se && d > 0.0);
    Ok(DivergenceReport { level, points, non_increasing, strictly_decreasing })
}

/// Time-one quantities of one replicate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeOneSample {
    /// The simulated clock reached `t = 1`.
    pub covered: bool,
    pub x1: f64,
    pub v1: f64,
    pub zero_residual: f64,
    pub two_way_residual: f64,
    pub relative_head_bound: f64,
}

/// Simulates `n` counterexample paths up to clock time 1.
pub fn time_one_samples<P: Replicator>(
    alpha: f64,
    beta: f64,
    horizon: f64,
    n: usize,
    grid_per_unit: usize,
    master_seed: u64,
    replicator: &P,
) -> Result<Vec<TimeOneSample>, CounterexampleError> {
    let cfg = CounterexampleConfig {
        stop_after_clock: Some(1.0),
        ..CounterexampleConfig::new(alpha, beta, horizon, grid_per_unit)
    };
    cfg.validate()?;
    collect(replicator.map(n, |i| {
        let run = run_counterexample(&cfg, &mut rng_for(master_seed, i as u64, StreamTag::DRIVER))?;
        let covered = run.clock_total() > 1.0;
        Ok(TimeOneSample {
            covered,
            x1: run.x_at(1.0).unwrap_or(f64::NAN),
            v1: run.v_at(1.0).unwrap_or(f64::NAN),
            zero_residual: run.zero_solution_residual(1.0),
            two_way_residual: run.two_way_residual(1.0),
            relative_head_bound: run.head_bound() / run.clock_total().min(1.0),
        })
    }))
}

/// KS comparison of `V_1` with exact `Z_1` draws.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VLawReport {
    pub ks: KsReport,
    pub coverage: f64,
    pub covered: usize,
    pub n: usize,
    /// Coverage below one half: the horizon is too short for a verdict.
    pub inconclusive: bool,
    pub max_two_way_residual: f64,
    pub mean_relative_head_bound: f64,
}

/// Builds the `V_1` report from time-one samples and a reference stream.
pub fn v_law_report(
    alpha: f64,
    samples: &[TimeOneSample],
    master_seed: u64,
) -> Result<VLawReport, CounterexampleError> {
    let n = samples.len();
    if n < MIN_REPLICATES {
        return Err(CounterexampleError::TooFewReplicates(n));
    }
    let covered: Vec<&TimeOneSample> = samples.iter().filter(|s| s.covered).collect();
    let params = StableParams::standard(alpha)?;
    let mut rng = rng_for(master_seed, 0, StreamTag::REFERENCE);
    let reference = (0..n).map(|_| sample_exact_increment(&params, 1.0, &mut rng)).collect::<Result<Vec<_>, _>>()?;
    let v = SampleSet::new(covered.iter().map(|s| s.v1).collect())?;
    let ks = ks_two_sample(&v, &SampleSet::new(reference)?)?;
    let coverage = covered.len() as f64 / n as f64;
    Ok(VLawReport {
        ks,
        coverage,
        covered: covered.len(),
        n,
        inconclusive: coverage < 0.5,
        max_two_way_residual: covered.iter().map(|s| s.two_way_residual).fold(0.0, f64::max),
        mean_relative_head_bound: covered.iter().map(|s| s.relative_head_bound).sum::<f64>()
            / covered.len().max(1) as f64,
    })
}

/// `V_1` law check: simulates the paths and compares with exact `Z_1`.
pub fn v_law_check<P: Replicator>(
    alpha: f64,
    beta: f64,
    horizon: f64,
    n: usize,
    grid_per_unit: usize,
    master_seed: u64,
    replicator: &P,
) -> Result<VLawReport, CounterexampleError> {
    check_exponents(alpha, beta)?;
    let samples = time_one_samples(alpha, beta, horizon, n, grid_per_unit, master_seed, replicator)?;
    v_law_report(alpha, &samples, master_seed)
}

/// Two solutions from the same start: the zero path and `Z_γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonuniquenessReport {
    pub n: usize,
    pub covered: usize,
    pub coverage: f64,
    /// Fraction of covered runs with `X_1 > 0`.
    pub positive_fraction: f64,
    /// Largest residual of `X ≡ 0` in `dX = φ(X_-) dV` over all runs.
    pub zero_residual: f64,
}

pub fn nonuniqueness_report(samples: &[TimeOneSample]) -> NonuniquenessReport {
    let n = samples.len();
    let covered = samples.iter().filter(|s| s.covered).count();
    let positive = samples.iter().filter(|s| s.covered && s.x1 > 0.0).count();
    NonuniquenessReport {
        n,
        covered,
        coverage: covered as f64 / n.max(1) as f64,
        positive_fraction: positive as f64 / covered.max(1) as f64,
        zero_residual: samples.iter().map(|s| s.zero_residual).fold(0.0, f64::max),
    }
}

pub fn nonuniqueness_demo<P: Replicator>(
    alpha: f64,
    beta: f64,
    horizon: f64,
    n: usize,
    grid_per_unit: usize,
    master_seed: u64,
    replicator: &P,
) -> Result<NonuniquenessReport, CounterexampleError> {
    check_exponents(alpha, beta)?;
    let samples = time_one_samples(alpha, beta, horizon, n, grid_per_unit, master_seed, replicator)?;
    Ok(nonuniqueness_report(&samples))
}
