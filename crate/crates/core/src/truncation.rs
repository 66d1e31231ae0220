//! Strong solutions through jump truncation.
//!
//! With the driver truncated at `ε > 0` there are finitely many jumps, and
//! `dX = φ(X_-) dZ^ε` is solved exactly: `X` is constant between jumps and
//! moves by `φ(X_-)·ΔZ` at each one. Solving every truncation level on
//! thinnings of one base path couples the levels; for non-decreasing `φ` the
//! finer level then dominates the coarser one at all times.

use alloc::vec::Vec;

use rand::Rng;
use thiserror::Error;

use crate::driver::{sample_truncated_path, DriverError, JumpPath, StableParams};
use crate::phi::{MonotonePhi, PhiError};

pub const DEFAULT_OVERFLOW_GUARD: f64 = 1.0e300;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("φ = {0} violates the standing assumption; only the counterexample may use it")]
    RejectedPhi(alloc::string::String),
    #[error("driver has cutoff 0 and infinitely many jumps")]
    InfiniteActivity,
    #[error("initial value must be finite, got {0}")]
    NonFiniteStart(f64),
    #[error("φ({x}) is not finite at t = {t}")]
    NonFinitePhi { t: f64, x: f64 },
    #[error("cutoffs must be positive and strictly decreasing")]
    BadCutoffs,
    #[error("time {t} outside the solution domain (horizon {horizon})")]
    OutsideHorizon { t: f64, horizon: f64 },
    #[error("trajectory crossed the overflow guard at t = {0}")]
    Exploded(f64),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Driver(#[from] DriverError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Trajectories with `|X| > overflow_guard` are stopped and flagged.
    pub overflow_guard: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { overflow_guard: DEFAULT_OVERFLOW_GUARD }
    }
}

/// One jump of a solution: `X_{t-} = pre`, `X_t = post`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionEvent {
    pub t: f64,
    pub pre: f64,
    pub post: f64,
}

/// Piecewise-constant càdlàg solution.
///
/// Defined on `[0, horizon]`, or on `[0, horizon)` for time-changed
/// solutions whose clock ran out at `horizon`.
#[derive(Debug, Clone, PartialEq)]
pub struct SolutionPath {
    x0: f64,
    horizon: f64,
    open_horizon: bool,
    events: Vec<SolutionEvent>,
    guard_hit: Option<f64>,
}

impl SolutionPath {
    pub(crate) fn new(x0: f64, horizon: f64, open_horizon: bool, events: Vec<SolutionEvent>) -> Self {
        Self { x0, horizon, open_horizon, events, guard_hit: None }
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// True when the horizon itself is not part of the domain.
    pub fn open_horizon(&self) -> bool {
        self.open_horizon
    }

    pub fn events(&self) -> &[SolutionEvent] {
        &self.events
    }

    /// Time at which the overflow guard stopped the trajectory.
    pub fn guard_hit(&self) -> Option<f64> {
        self.guard_hit
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= 0.0 && (t < self.horizon || (!self.open_horizon && t == self.horizon))
    }

    /// `X_t`, right-continuous.
    pub fn value(&self, t: f64) -> Result<f64, SolveError> {
        if !self.contains(t) {
            return Err(SolveError::OutsideHorizon { t, horizon: self.horizon });
        }
        if let Some(g) = self.guard_hit {
            if t >= g {
                return Err(SolveError::Exploded(g));
            }
        }
        let k = self.events.partition_point(|e| e.t <= t);
        Ok(if k == 0 { self.x0 } else { self.events[k - 1].post })
    }

    /// `X_T` (or `X_{T-}` for an open horizon).
    pub fn terminal(&self) -> f64 {
        self.events.last().map_or(self.x0, |e| e.post)
    }
}

fn require_assumption(phi: &MonotonePhi) -> Result<(), SolveError> {
    if phi.assumption_ok() {
        Ok(())
    } else {
        Err(SolveError::RejectedPhi(alloc::format!("{phi}")))
    }
}

/// Exact solution of `dX = φ(X_-) dZ^ε`, `X_0 = x0`.
pub fn solve_truncated(
    phi: &MonotonePhi,
    x0: f64,
    driver: &JumpPath,
    opts: &SolverOptions,
) -> Result<SolutionPath, SolveError> {
    require_assumption(phi)?;
    if driver.cutoff() <= 0.0 {
        return Err(SolveError::InfiniteActivity);
    }
    if !x0.is_finite() {
        return Err(SolveError::NonFiniteStart(x0));
    }
    let mut events = Vec::with_capacity(driver.len());
    let mut x = x0;
    let mut guard_hit = None;
    for (t, dz) in driver.events() {
        let f = phi.eval(x)?;
        if !f.is_finite() {
            return Err(SolveError::NonFinitePhi { t, x });
        }
        let post = x + f * dz;
        if !(post.abs() <= opts.overflow_guard) {
            guard_hit = Some(t);
            break;
        }
        events.push(SolutionEvent { t, pre: x, post });
        x = post;
    }
    Ok(SolutionPath { x0, horizon: driver.horizon(), open_horizon: false, events, guard_hit })
}

/// Replays `path` against its driver and returns the number of events that
/// do not satisfy `post = pre + φ(pre)·ΔZ` bit for bit, or whose pre-jump
/// value differs from the previous post-jump value.
pub fn replay_mismatches(phi: &MonotonePhi, path: &SolutionPath, driver: &JumpPath) -> usize {
    let mut mismatches = match path.guard_hit {
        Some(_) => 0,
        None => driver.len().abs_diff(path.events.len()),
    };
    let mut prev = path.x0;
    for (e, (t, dz)) in path.events.iter().zip(driver.events()) {
        let expected = phi.eval(e.pre).map(|f| e.pre + f * dz);
        if e.t != t || e.pre != prev || expected != Ok(e.post) {
            mismatches += 1;
        }
        prev = e.post;
    }
    mismatches
}

/// Sorted union of both paths' jump times together with `0` and the common
/// horizon. Both paths are piecewise constant, so a supremum over `[0, T]`
/// is a maximum over these times.
pub fn comparison_times(a: &SolutionPath, b: &SolutionPath) -> Vec<f64> {
    let mut times = Vec::with_capacity(a.events.len() + b.events.len() + 2);
    times.push(0.0);
    let (mut i, mut j) = (0, 0);
    let (ea, eb) = (&a.events, &b.events);
    while i < ea.len() || j < eb.len() {
        let t = match (ea.get(i), eb.get(j)) {
            (Some(x), Some(y)) if x.t == y.t => {
                i += 1;
                j += 1;
                x.t
            }
            (Some(x), Some(y)) if x.t < y.t => {
                i += 1;
                x.t
            }
            (Some(x), None) => {
                i += 1;
                x.t
            }
            (_, Some(y)) => {
                j += 1;
                y.t
            }
            (None, None) => unreachable!(),
        };
        if *times.last().unwrap() != t {
            times.push(t);
        }
    }
    let horizon = a.horizon.min(b.horizon);
    if *times.last().unwrap() != horizon && a.contains(horizon) && b.contains(horizon) {
        times.push(horizon);
    }
    times
}

fn stop_time(a: &SolutionPath, b: &SolutionPath) -> f64 {
    match (a.guard_hit, b.guard_hit) {
        (Some(x), Some(y)) => x.min(y),
        (Some(x), None) | (None, Some(x)) => x,
        (None, None) => f64::INFINITY,
    }
}

/// Times where `lower_t > upper_t`, compared exactly over
/// [`comparison_times`] (up to any overflow stop).
pub fn dominance_violations(lower: &SolutionPath, upper: &SolutionPath) -> Vec<f64> {
    let stop = stop_time(lower, upper);
    comparison_times(lower, upper)
        .into_iter()
        .filter(|&t| t < stop)
        .filter(|&t| match (lower.value(t), upper.value(t)) {
            (Ok(l), Ok(u)) => l > u,
            _ => false,
        })
        .collect()
}

/// `sup_t |a_t - b_t|` over the common domain (up to any overflow stop).
pub fn sup_distance(a: &SolutionPath, b: &SolutionPath) -> f64 {
    let stop = stop_time(a, b);
    comparison_times(a, b)
        .into_iter()
        .filter(|&t| t < stop)
        .filter_map(|t| Some((a.value(t).ok()? - b.value(t).ok()?).abs()))
        .fold(0.0, f64::max)
}

/// Solutions at several truncation levels, all driven by thinnings of one
/// base path. Cutoffs are stored coarsest first.
#[derive(Debug, Clone, PartialEq)]
pub struct Ladder {
    base: JumpPath,
    cutoffs: Vec<f64>,
    levels: Vec<SolutionPath>,
}

impl Ladder {
    /// Solves every level on thinnings of `base`. `cutoffs` must be positive,
    /// strictly decreasing and no finer than the base path's own cutoff.
    pub fn from_base(
        phi: &MonotonePhi,
        x0: f64,
        base: JumpPath,
        cutoffs: &[f64],
        opts: &SolverOptions,
    ) -> Result<Self, SolveError> {
        check_cutoffs(cutoffs)?;
        let levels = cutoffs
            .iter()
            .map(|&eps| solve_truncated(phi, x0, &base.thin(eps)?, opts))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { base, cutoffs: cutoffs.to_vec(), levels })
    }

    pub fn base(&self) -> &JumpPath {
        &self.base
    }

    pub fn cutoffs(&self) -> &[f64] {
        &self.cutoffs
    }

    pub fn levels(&self) -> &[SolutionPath] {
        &self.levels
    }

    /// Every time at which some coarser level exceeds some finer one.
    pub fn violations(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for j in 0..self.levels.len() {
            for k in j + 1..self.levels.len() {
                for t in dominance_violations(&self.levels[j], &self.levels[k]) {
                    out.push((j, k, t));
                }
            }
        }
        out
    }

    /// Number of levels stopped by the overflow guard.
    pub fn guard_hits(&self) -> usize {
        self.levels.iter().filter(|l| l.guard_hit.is_some()).count()
    }
}

fn check_cutoffs(cutoffs: &[f64]) -> Result<(), SolveError> {
    let positive = cutoffs.iter().all(|&e| e > 0.0 && e.is_finite());
    let decreasing = cutoffs.windows(2).all(|w| w[1] < w[0]);
    if cutoffs.is_empty() || !positive || !decreasing {
        return Err(SolveError::BadCutoffs);
    }
    Ok(())
}

/// Samples one base path at the finest cutoff and solves each level on its
/// thinning.
pub fn build_ladder<R: Rng + ?Sized>(
    phi: &MonotonePhi,
    x0: f64,
    params: &StableParams,
    horizon: f64,
    cutoffs: &[f64],
    rng: &mut R,
    opts: &SolverOptions,
) -> Result<Ladder, SolveError> {
    check_cutoffs(cutoffs)?;
    require_assumption(phi)?;
    let finest = *cutoffs.last().unwrap();
    let base = sample_truncated_path(params, horizon, finest, rng)?;
    Ladder::from_base(phi, x0, base, cutoffs, opts)
}

/// Level values at one time, coarsest first, with successive increments.
///
/// The increments are non-negative by the ladder invariant; no
/// extrapolation beyond the finest level is attempted.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneLimit {
    pub t: f64,
    pub values: Vec<f64>,
    pub differences: Vec<f64>,
}

impl MonotoneLimit {
    /// Best available value: the finest level.
    pub fn finest(&self) -> f64 {
        *self.values.last().unwrap()
    }
}

pub fn monotone_limit_estimate(ladder: &Ladder, t: f64) -> Result<MonotoneLimit, SolveError> {
    let values = ladder.levels.iter().map(|l| l.value(t)).collect::<Result<Vec<_>, _>>()?;
    let differences = values.windows(2).map(|w| w[1] - w[0]).collect();
    Ok(MonotoneLimit { t, values, differences })
}

/// Sup-distance between the solutions at cutoffs `eps` and `eps/2` on one
/// shared noise realization.
pub fn coupled_pair_distance<R: Rng + ?Sized>(
    phi: &MonotonePhi,
    x0: f64,
    params: &StableParams,
    horizon: f64,
    eps: f64,
    rng: &mut R,
    opts: &SolverOptions,
) -> Result<f64, SolveError> {
    require_assumption(phi)?;
    let base = sample_truncated_path(params, horizon, eps / 2.0, rng)?;
    pair_distance_on(phi, x0, &base, eps, opts)
}

/// Sup-distance between the solution on `base` and on `base` thinned to
/// `coarse_eps`.
pub fn pair_distance_on(
    phi: &MonotonePhi,
    x0: f64,
    base: &JumpPath,
    coarse_eps: f64,
    opts: &SolverOptions,
) -> Result<f64, SolveError> {
    let fine = solve_truncated(phi, x0, base, opts)?;
    let coarse = solve_truncated(phi, x0, &base.thin(coarse_eps)?, opts)?;
    Ok(sup_distance(&coarse, &fine))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::{rng_for, StreamTag};
    use alloc::vec;
    use core::f64::consts::PI;
    use proptest::prelude::*;

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    fn driver(events: &[(f64, f64)], cutoff: f64) -> JumpPath {
        JumpPath::from_events(1.0, cutoff, events.iter().copied()).unwrap()
    }

    #[test]
    fn empty_driver_keeps_initial_value() {
        let phi = MonotonePhi::constant(2.0).unwrap();
        let x = solve_truncated(&phi, 1.5, &JumpPath::empty(1.0, 0.1).unwrap(), &opts()).unwrap();
        assert!(x.events().is_empty());
        assert_eq!(x.value(0.0).unwrap(), 1.5);
        assert_eq!(x.value(1.0).unwrap(), 1.5);
    }

    #[test]
    fn unit_coefficient_adds_driver() {
        let phi = MonotonePhi::constant(1.0).unwrap();
        let x = solve_truncated(&phi, 1.0, &driver(&[(0.5, 2.0)], 0.1), &opts()).unwrap();
        assert_eq!(x.value(0.49).unwrap(), 1.0);
        assert_eq!(x.value(1.0).unwrap(), 3.0);
    }

    #[test]
    fn two_step_arctan_recursion() {
        let phi = MonotonePhi::shifted_arctan(2.0, 2.0 / PI).unwrap();
        let z = driver(&[(0.3, 1.0), (0.6, 1.0)], 0.5);
        let x = solve_truncated(&phi, 0.0, &z, &opts()).unwrap();
        // Hand iteration: φ(0) = 3, then φ(3) = 2 + (2/π)(arctan 3 + π/2).
        let first = 0.0 + (2.0 + (2.0 / PI) * (0.0f64.atan() + PI / 2.0)) * 1.0;
        let second = first + (2.0 + (2.0 / PI) * (first.atan() + PI / 2.0)) * 1.0;
        assert!((x.value(0.3).unwrap() - 3.0).abs() < 1e-15);
        assert!((x.value(1.0).unwrap() - second).abs() < 1e-14);
        assert!((x.value(1.0).unwrap() - 6.7952).abs() < 1e-4);
        assert_eq!(replay_mismatches(&phi, &x, &z), 0);
    }

    #[test]
    fn solver_rejects_degenerate_inputs() {
        let power = MonotonePhi::power(0.5).unwrap();
        let z = driver(&[(0.5, 1.0)], 0.1);
        assert!(matches!(solve_truncated(&power, 0.0, &z, &opts()), Err(SolveError::RejectedPhi(_))));
        let phi = MonotonePhi::constant(1.0).unwrap();
        assert_eq!(solve_truncated(&phi, 0.0, &driver(&[(0.5, 1.0)], 0.0), &opts()), Err(SolveError::InfiniteActivity));
        assert!(solve_truncated(&phi, f64::NAN, &z, &opts()).is_err());
    }

    #[test]
    fn overflow_guard_stops_trajectory() {
        let phi = MonotonePhi::soft_ramp(1.0, 1.0).unwrap();
        let z = driver(&[(0.1, 1e200), (0.2, 1e200), (0.3, 1.0)], 0.5);
        let x = solve_truncated(&phi, 0.0, &z, &opts()).unwrap();
        assert_eq!(x.guard_hit(), Some(0.2));
        assert_eq!(x.events().len(), 1);
        assert_eq!(x.value(0.15).unwrap(), 1e200);
        assert_eq!(x.value(0.5), Err(SolveError::Exploded(0.2)));
    }

    #[test]
    fn single_level_ladder() {
        let phi = MonotonePhi::constant(1.0).unwrap();
        let p = StableParams::standard(0.6).unwrap();
        let ladder = build_ladder(&phi, 0.0, &p, 1.0, &[0.05], &mut rng_for(1, 0, StreamTag::DRIVER), &opts()).unwrap();
        assert_eq!(ladder.levels().len(), 1);
        assert!(ladder.violations().is_empty());
        let limit = monotone_limit_estimate(&ladder, 1.0).unwrap();
        assert_eq!(limit.values.len(), 1);
        assert!(limit.differences.is_empty());
    }

    #[test]
    fn ladder_rejects_bad_cutoffs() {
        let phi = MonotonePhi::constant(1.0).unwrap();
        let p = StableParams::standard(0.6).unwrap();
        let mut rng = rng_for(1, 0, StreamTag::DRIVER);
        for bad in [&[][..], &[0.01, 0.1], &[0.1, 0.1], &[0.1, 0.0], &[0.1, -0.01]] {
            assert_eq!(build_ladder(&phi, 0.0, &p, 1.0, bad, &mut rng, &opts()), Err(SolveError::BadCutoffs));
        }
    }

    #[test]
    fn linear_ladder_differs_by_thinned_mass() {
        let c = 1.75;
        let phi = MonotonePhi::constant(c).unwrap();
        let p = StableParams::standard(0.6).unwrap();
        let cutoffs = [0.3, 0.1, 0.02];
        for seed in 0..50 {
            let ladder =
                build_ladder(&phi, 0.5, &p, 1.0, &cutoffs, &mut rng_for(seed, 0, StreamTag::DRIVER), &opts()).unwrap();
            let limit = monotone_limit_estimate(&ladder, 1.0).unwrap();
            for (k, d) in limit.differences.iter().enumerate() {
                let band: f64 = ladder.base().sizes().iter().filter(|&&s| s >= cutoffs[k + 1] && s < cutoffs[k]).sum();
                assert!(*d >= 0.0);
                assert!((d - c * band).abs() <= 1e-12 * (1.0 + limit.finest().abs()), "{d} vs {}", c * band);
            }
        }
    }

    #[test]
    fn constant_pair_distance_is_band_mass() {
        let c = 3.0;
        let phi = MonotonePhi::constant(c).unwrap();
        let p = StableParams::standard(0.5).unwrap();
        for seed in 0..50 {
            let mut rng = rng_for(seed, 0, StreamTag::DRIVER);
            let base = sample_truncated_path(&p, 1.0, 0.05, &mut rng).unwrap();
            let d = pair_distance_on(&phi, 0.0, &base, 0.1, &opts()).unwrap();
            let band: f64 = base.sizes().iter().filter(|&&s| s < 0.1).sum();
            assert!((d - c * band).abs() <= 1e-12 * (1.0 + c * base.value(1.0).unwrap()));
            assert_eq!(pair_distance_on(&phi, 0.0, &base, base.cutoff(), &opts()).unwrap(), 0.0);
        }
    }

    #[test]
    fn comparison_times_is_sorted_union() {
        let a = SolutionPath::new(
            0.0,
            1.0,
            false,
            vec![SolutionEvent { t: 0.2, pre: 0.0, post: 1.0 }, SolutionEvent { t: 0.5, pre: 1.0, post: 2.0 }],
        );
        let b = SolutionPath::new(
            0.0,
            1.0,
            false,
            vec![SolutionEvent { t: 0.3, pre: 0.0, post: 1.0 }, SolutionEvent { t: 0.5, pre: 1.0, post: 3.0 }],
        );
        assert_eq!(comparison_times(&a, &b), vec![0.0, 0.2, 0.3, 0.5, 1.0]);
        assert_eq!(sup_distance(&a, &b), 1.0);
        assert_eq!(dominance_violations(&a, &b), vec![0.2]);
        assert_eq!(dominance_violations(&b, &a), vec![0.5, 1.0]);
    }

    fn arb_phi() -> impl Strategy<Value = MonotonePhi> {
        prop_oneof![
            (0.1..5.0f64).prop_map(|a| MonotonePhi::constant(a).unwrap()),
            (0.1..5.0f64, 0.0..3.0f64).prop_map(|(a, b)| MonotonePhi::shifted_arctan(a, b).unwrap()),
            (0.1..5.0f64, 0.0..3.0f64).prop_map(|(a, b)| MonotonePhi::soft_ramp(a, b).unwrap()),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ladder_is_monotone(phi in arb_phi(), x0 in -5.0..5.0f64, alpha in 0.2..0.9f64, seed in any::<u64>()) {
            let p = StableParams::standard(alpha).unwrap();
            let ladder = build_ladder(&phi, x0, &p, 1.0, &[0.2, 0.05, 0.01], &mut rng_for(seed, 0, StreamTag::DRIVER), &opts()).unwrap();
            prop_assert!(ladder.violations().is_empty());
            let limit = monotone_limit_estimate(&ladder, 1.0).unwrap();
            prop_assert!(limit.differences.iter().all(|&d| d >= 0.0));
        }

        #[test]
        fn solution_is_monotone_in_initial_value(phi in arb_phi(), x0 in -5.0..5.0f64, shift in 0.0..3.0f64, seed in any::<u64>()) {
            let p = StableParams::standard(0.6).unwrap();
            let z = sample_truncated_path(&p, 1.0, 0.01, &mut rng_for(seed, 0, StreamTag::DRIVER)).unwrap();
            let lo = solve_truncated(&phi, x0, &z, &opts()).unwrap();
            let hi = solve_truncated(&phi, x0 + shift, &z, &opts()).unwrap();
            prop_assert!(dominance_violations(&lo, &hi).is_empty());
        }

        #[test]
        fn replay_is_bit_identical(phi in arb_phi(), x0 in -5.0..5.0f64, seed in any::<u64>()) {
            let p = StableParams::standard(0.7).unwrap();
            let z = sample_truncated_path(&p, 1.0, 0.01, &mut rng_for(seed, 0, StreamTag::DRIVER)).unwrap();
            let a = solve_truncated(&phi, x0, &z, &opts()).unwrap();
            let z2 = sample_truncated_path(&p, 1.0, 0.01, &mut rng_for(seed, 0, StreamTag::DRIVER)).unwrap();
            let b = solve_truncated(&phi, x0, &z2, &opts()).unwrap();
            prop_assert_eq!(&a, &b);
            prop_assert_eq!(replay_mismatches(&phi, &a, &z), 0);
        }

        #[test]
        fn constant_coefficient_is_linear(c in 0.1..10.0f64, x0 in -5.0..5.0f64, seed in any::<u64>()) {
            let phi = MonotonePhi::constant(c).unwrap();
            let p = StableParams::standard(0.5).unwrap();
            let z = sample_truncated_path(&p, 1.0, 0.001, &mut rng_for(seed, 0, StreamTag::DRIVER)).unwrap();
            let x = solve_truncated(&phi, x0, &z, &opts()).unwrap();
            for e in x.events() {
                let expected = c * z.value(e.t).unwrap();
                prop_assert!((e.post - x0 - expected).abs() <= 1e-12 * expected.abs().max(x0.abs()));
            }
        }
    }
}
