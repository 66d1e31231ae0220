//! Weak solutions by time change.
//!
//! Given a driver path `Z̃`, the clock `B_u = ∫_0^u φ(x + Z̃_s)^{-α} ds` is
//! strictly increasing when `φ > 0`. With `τ` its right inverse,
//! `X_t = x + Z̃_{τ_t}` solves `dX = φ(X_-) dZ` for a driver `Z` with the
//! same law as `Z̃`, and `τ_t = ∫_0^t φ(X_s)^α ds`.
//!
//! On a piecewise-constant driver both clocks are piecewise linear, so
//! everything here is exact up to rounding.

use alloc::vec::Vec;

use thiserror::Error;

use crate::clock::{Clock, ClockError, ClockInverse};
use crate::driver::{DriverError, JumpPath};
use crate::phi::{MonotonePhi, PhiError};
use crate::truncation::{SolutionEvent, SolutionPath};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TimeChangeError {
    #[error("φ = {0} violates the standing assumption")]
    RejectedPhi(alloc::string::String),
    #[error("stable order must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("initial value must be finite, got {0}")]
    NonFiniteStart(f64),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Clock(#[from] ClockError),
    #[error(transparent)]
    Driver(#[from] DriverError),
}

fn check_inputs(phi: &MonotonePhi, x: f64, alpha: f64) -> Result<(), TimeChangeError> {
    if !phi.assumption_ok() {
        return Err(TimeChangeError::RejectedPhi(alloc::format!("{phi}")));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(TimeChangeError::InvalidAlpha(alpha));
    }
    if !x.is_finite() {
        return Err(TimeChangeError::NonFiniteStart(x));
    }
    Ok(())
}

/// `B_u = ∫_0^u φ(x + Z̃_s)^{-α} ds` on `[0, T]`, with breakpoints at the
/// driver's jump times.
pub fn build_clock_b(phi: &MonotonePhi, x: f64, driver: &JumpPath, alpha: f64) -> Result<Clock, TimeChangeError> {
    check_inputs(phi, x, alpha)?;
    let mut breakpoints = Vec::with_capacity(driver.len() + 2);
    let mut slopes = Vec::with_capacity(driver.len() + 1);
    breakpoints.push(0.0);
    slopes.push(phi.eval_pow(x, -alpha)?);
    let mut z = 0.0;
    for (t, dz) in driver.events() {
        z += dz;
        if t == driver.horizon() {
            break;
        }
        breakpoints.push(t);
        slopes.push(phi.eval_pow(x + z, -alpha)?);
    }
    breakpoints.push(driver.horizon());
    Ok(Clock::from_slopes(breakpoints, slopes)?)
}

/// Right inverse of a clock; see [`Clock::invert`].
pub fn invert_clock(clock: &Clock, t: f64) -> ClockInverse {
    clock.invert(t)
}

/// The time-changed solution together with the clock that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeChangeRun {
    pub clock: Clock,
    pub solution: SolutionPath,
}

/// `X_t = x + Z̃_{τ_t}` on `[0, B_T)`.
///
/// `X` jumps at `B_{u_i}` for each driver jump time `u_i`; past `B_T` the
/// driver has no data and the path is undefined.
pub fn time_change_run(
    phi: &MonotonePhi,
    x: f64,
    driver: &JumpPath,
    alpha: f64,
) -> Result<TimeChangeRun, TimeChangeError> {
    let clock = build_clock_b(phi, x, driver, alpha)?;
    let mut events = Vec::with_capacity(driver.len());
    let mut z = 0.0;
    for (i, (_, dz)) in driver.events().enumerate() {
        let pre = x + z;
        z += dz;
        if i + 1 >= clock.values().len() - 1 {
            // a jump exactly at T maps to B_T, outside [0, B_T)
            break;
        }
        events.push(SolutionEvent { t: clock.values()[i + 1], pre, post: x + z });
    }
    let solution = SolutionPath::new(x, clock.total(), true, events);
    Ok(TimeChangeRun { clock, solution })
}

pub fn solve_time_change(
    phi: &MonotonePhi,
    x: f64,
    driver: &JumpPath,
    alpha: f64,
) -> Result<SolutionPath, TimeChangeError> {
    Ok(time_change_run(phi, x, driver, alpha)?.solution)
}

/// `τ_t = ∫_0^t φ(X_s)^α ds` built directly from a solved path on its domain.
pub fn build_clock_tau(phi: &MonotonePhi, solution: &SolutionPath, alpha: f64) -> Result<Clock, TimeChangeError> {
    let mut breakpoints = Vec::with_capacity(solution.events().len() + 2);
    let mut slopes = Vec::with_capacity(solution.events().len() + 1);
    breakpoints.push(0.0);
    slopes.push(phi.eval_pow(solution.x0(), alpha)?);
    for e in solution.events() {
        breakpoints.push(e.t);
        slopes.push(phi.eval_pow(e.post, alpha)?);
    }
    breakpoints.push(solution.horizon());
    Ok(Clock::from_slopes(breakpoints, slopes)?)
}

/// `max |τ(B_u) - u|` over the driver breakpoints and `max |B(τ_t) - t|` over
/// the solution's jump times, where `τ` is rebuilt from the solved path
/// rather than obtained by inverting `B`.
pub fn clock_roundtrip_residual(
    phi: &MonotonePhi,
    x: f64,
    driver: &JumpPath,
    alpha: f64,
) -> Result<f64, TimeChangeError> {
    let run = time_change_run(phi, x, driver, alpha)?;
    let tau = build_clock_tau(phi, &run.solution, alpha)?;
    let b = &run.clock;
    let mut residual: f64 = 0.0;
    for &u in b.breakpoints() {
        let t = b.eval(u)?.min(tau.end());
        residual = residual.max((tau.eval(t)? - u).abs());
    }
    for &t in tau.breakpoints() {
        let u = tau.eval(t)?.min(b.end());
        residual = residual.max((b.eval(u)? - t).abs());
    }
    Ok(residual)
}

/// The driver `Z` of `dX = φ(X_-) dZ` recovered from a time-changed
/// solution: a jump of size `ΔX / φ(X_-)` at each jump of `X`.
pub fn recovered_driver(phi: &MonotonePhi, solution: &SolutionPath) -> Result<JumpPath, TimeChangeError> {
    let events = solution
        .events()
        .iter()
        .map(|e| Ok((e.t, (e.post - e.pre) / phi.eval(e.pre)?)))
        .collect::<Result<Vec<_>, PhiError>>()?;
    Ok(JumpPath::from_events(solution.horizon(), 0.0, events)?)
}
