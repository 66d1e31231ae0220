//! Continuous, strictly increasing, piecewise-linear additive functionals and
//! their right inverses.

use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClockError {
    #[error("clock needs at least one segment")]
    Empty,
    #[error("breakpoints must start at 0 and be strictly increasing (index {0})")]
    BadBreakpoints(usize),
    #[error("slope {slope} of segment {index} is not positive and finite")]
    BadSlope { index: usize, slope: f64 },
    #[error("{0} slopes for {1} breakpoints")]
    LengthMismatch(usize, usize),
    #[error("time {0} outside the clock's domain")]
    OutOfDomain(f64),
}

/// Result of inverting a clock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClockInverse {
    At(f64),
    /// The target exceeds everything the clock accumulated before its end;
    /// on an infinite horizon this is where the inverse would be `∞` or lie
    /// past the simulated data.
    BeyondHorizon,
}

impl ClockInverse {
    pub fn at(self) -> Option<f64> {
        match self {
            ClockInverse::At(s) => Some(s),
            ClockInverse::BeyondHorizon => None,
        }
    }
}

/// `C(u) = ∫_0^u slope(s) ds` with a piecewise-constant positive slope.
///
/// Invariant: `values[i + 1] - values[i] = slopes[i] · (u_{i+1} - u_i)` up to
/// rounding, with `values[0] = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Clock {
    breakpoints: Vec<f64>,
    slopes: Vec<f64>,
    values: Vec<f64>,
}

impl Clock {
    /// Builds the clock with `slopes[i]` on `[breakpoints[i], breakpoints[i+1])`.
    ///
    /// Consecutive segments with the same slope are accumulated from the
    /// start of their run, so a constant-slope clock is `slope · u` with a
    /// single rounding per value (and exactly `u` for unit slope).
    pub fn from_slopes(breakpoints: Vec<f64>, slopes: Vec<f64>) -> Result<Self, ClockError> {
        if slopes.is_empty() {
            return Err(ClockError::Empty);
        }
        if breakpoints.len() != slopes.len() + 1 {
            return Err(ClockError::LengthMismatch(slopes.len(), breakpoints.len()));
        }
        if breakpoints[0] != 0.0 {
            return Err(ClockError::BadBreakpoints(0));
        }
        for (i, w) in breakpoints.windows(2).enumerate() {
            if !(w[1] > w[0]) || !w[1].is_finite() {
                return Err(ClockError::BadBreakpoints(i + 1));
            }
        }
        for (index, &slope) in slopes.iter().enumerate() {
            if !(slope > 0.0 && slope.is_finite()) {
                return Err(ClockError::BadSlope { index, slope });
            }
        }
        let mut values = Vec::with_capacity(breakpoints.len());
        values.push(0.0);
        let mut run_start = 0;
        for i in 0..slopes.len() {
            if slopes[i] != slopes[run_start] {
                run_start = i;
            }
            let v = values[run_start] + slopes[i] * (breakpoints[i + 1] - breakpoints[run_start]);
            values.push(v);
        }
        Ok(Self { breakpoints, slopes, values })
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Right end of the domain.
    pub fn end(&self) -> f64 {
        *self.breakpoints.last().unwrap()
    }

    /// Value at the right end of the domain.
    pub fn total(&self) -> f64 {
        *self.values.last().unwrap()
    }

    /// `C(u)` for `u ∈ [0, end]`.
    pub fn eval(&self, u: f64) -> Result<f64, ClockError> {
        if !(0.0..=self.end()).contains(&u) {
            return Err(ClockError::OutOfDomain(u));
        }
        let i = self.breakpoints.partition_point(|&b| b <= u).saturating_sub(1).min(self.slopes.len() - 1);
        Ok(self.values[i] + self.slopes[i] * (u - self.breakpoints[i]))
    }

    /// Right inverse `inf{u ≥ 0 : C(u) > t}`.
    ///
    /// `C` is continuous and strictly increasing, so this is the ordinary
    /// inverse; at a stored value it returns the stored breakpoint exactly.
    /// Targets `t ≥ C(end)` give [`ClockInverse::BeyondHorizon`].
    pub fn invert(&self, t: f64) -> ClockInverse {
        if t.is_nan() || t >= self.total() {
            return ClockInverse::BeyondHorizon;
        }
        if t <= 0.0 {
            return ClockInverse::At(0.0);
        }
        let i = self.values.partition_point(|&v| v <= t) - 1;
        let u = self.breakpoints[i] + (t - self.values[i]) / self.slopes[i];
        ClockInverse::At(u.min(self.breakpoints[i + 1]))
    }
}

/// Free-function form of [`Clock::invert`].
pub fn invert_clock(clock: &Clock, t: f64) -> ClockInverse {
    clock.invert(t)
}
