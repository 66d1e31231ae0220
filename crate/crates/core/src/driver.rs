//! The one-sided stable driver `Z`.
//!
//! `Z` is a pure-jump subordinator with Lévy density `c·h^{-1-α}` on
//! `(0, ∞)`. Two path representations are provided:
//!
//! * [`JumpPath`]: the compound Poisson process of jumps `≥ ε`, stored as a
//!   sorted event list. Coarser truncations of the same noise are obtained by
//!   [`JumpPath::thin`].
//! * [`GridPath`]: exact increments on a uniform grid, for the places where
//!   truncation would remove the small-jump activity entirely.

use alloc::vec::Vec;
use core::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Poisson, StandardNormal};
use thiserror::Error;

/// Largest expected event count accepted by [`sample_truncated_path`].
pub const MAX_EXPECTED_EVENTS: f64 = 1.0e8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DriverError {
    #[error("stable order must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),
    #[error("Lévy density scale must be positive and finite, got {0}")]
    InvalidScale(f64),
    #[error("truncation cutoff must be positive and finite, got {0}")]
    InvalidCutoff(f64),
    #[error("horizon must be positive and finite, got {0}")]
    InvalidHorizon(f64),
    #[error("time step must be positive and finite, got {0}")]
    InvalidStep(f64),
    #[error("Laplace argument must be positive and finite, got {0}")]
    InvalidLaplaceArgument(f64),
    #[error("cannot thin to {requested}: path only holds jumps >= {cutoff}")]
    CutoffBelowPath { requested: f64, cutoff: f64 },
    #[error("time {t} outside [0, {horizon}]")]
    TimeOutOfRange { t: f64, horizon: f64 },
    #[error("expected {0} events exceeds the supported path size")]
    TooManyEvents(f64),
    #[error("malformed event list: {0}")]
    MalformedEvents(&'static str),
    #[error("grid needs at least one step")]
    EmptyGrid,
}

/// Order and Lévy-measure scale of the driving subordinator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StableParams {
    alpha: f64,
    c: f64,
}

impl StableParams {
    pub fn new(alpha: f64, c: f64) -> Result<Self, DriverError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(DriverError::InvalidAlpha(alpha));
        }
        if !(c > 0.0 && c.is_finite()) {
            return Err(DriverError::InvalidScale(c));
        }
        Ok(Self { alpha, c })
    }

    /// The normalization `c = α / Γ(1 - α)`, under which `ψ(λ) = λ^α`.
    pub fn standard(alpha: f64) -> Result<Self, DriverError> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(DriverError::InvalidAlpha(alpha));
        }
        Self::new(alpha, alpha / libm::tgamma(1.0 - alpha))
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    /// `κ` in `ψ(λ) = κ λ^α`.
    fn laplace_coefficient(&self) -> f64 {
        self.c * libm::tgamma(1.0 - self.alpha) / self.alpha
    }
}

/// Jump intensity `c ε^{-α} / α` of the driver truncated at `eps`.
pub fn levy_tail_mass(params: &StableParams, eps: f64) -> Result<f64, DriverError> {
    if !(eps > 0.0) || eps.is_nan() {
        return Err(DriverError::InvalidCutoff(eps));
    }
    if eps.is_infinite() {
        return Ok(0.0);
    }
    Ok(params.c * libm::pow(eps, -params.alpha) / params.alpha)
}

/// Laplace exponent `ψ(λ) = c Γ(1-α) λ^α / α`, so `E e^{-λ Z_t} = e^{-t ψ(λ)}`.
pub fn laplace_exponent(params: &StableParams, lambda: f64) -> Result<f64, DriverError> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(DriverError::InvalidLaplaceArgument(lambda));
    }
    Ok(params.laplace_coefficient() * libm::pow(lambda, params.alpha))
}

/// Finite list of jumps on `(0, horizon]`, all of size `>= cutoff`.
///
/// The path value at `t` is the sum of the sizes of jumps at times `<= t`.
#[derive(Debug, Clone, PartialEq)]
pub struct JumpPath {
    horizon: f64,
    cutoff: f64,
    times: Vec<f64>,
    sizes: Vec<f64>,
}

impl JumpPath {
    /// Path with no jumps.
    pub fn empty(horizon: f64, cutoff: f64) -> Result<Self, DriverError> {
        Self::from_events(horizon, cutoff, Vec::new())
    }

    /// Builds a path from `(time, size)` pairs, checking every invariant.
    pub fn from_events(
        horizon: f64,
        cutoff: f64,
        events: impl IntoIterator<Item = (f64, f64)>,
    ) -> Result<Self, DriverError> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(DriverError::InvalidHorizon(horizon));
        }
        if !(cutoff >= 0.0 && cutoff.is_finite()) {
            return Err(DriverError::InvalidCutoff(cutoff));
        }
        let (times, sizes): (Vec<f64>, Vec<f64>) = events.into_iter().unzip();
        let mut prev = 0.0;
        for (&t, &dz) in times.iter().zip(&sizes) {
            if !(t > prev) {
                return Err(DriverError::MalformedEvents("event times must be strictly increasing in (0, T]"));
            }
            if t > horizon {
                return Err(DriverError::MalformedEvents("event after the horizon"));
            }
            if !(dz > 0.0 && dz.is_finite()) {
                return Err(DriverError::MalformedEvents("jump sizes must be positive and finite"));
            }
            if dz < cutoff {
                return Err(DriverError::MalformedEvents("jump below the path cutoff"));
            }
            prev = t;
        }
        Ok(Self { horizon, cutoff, times, sizes })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn sizes(&self) -> &[f64] {
        &self.sizes
    }

    pub fn events(&self) -> impl ExactSizeIterator<Item = (f64, f64)> + '_ {
        self.times.iter().copied().zip(self.sizes.iter().copied())
    }

    /// Càdlàg evaluation: sum of jumps at times `<= t`.
    ///
    /// Jumps are summed left to right, so for a thinned path the value is
    /// never larger than the original's, even in floating point.
    pub fn value(&self, t: f64) -> Result<f64, DriverError> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(DriverError::TimeOutOfRange { t, horizon: self.horizon });
        }
        let k = self.times.partition_point(|&s| s <= t);
        Ok(self.sizes[..k].iter().sum())
    }

    /// Keeps only jumps `>= new_eps`.
    pub fn thin(&self, new_eps: f64) -> Result<JumpPath, DriverError> {
        if new_eps.is_nan() || new_eps < self.cutoff {
            return Err(DriverError::CutoffBelowPath { requested: new_eps, cutoff: self.cutoff });
        }
        let (times, sizes) = self.events().filter(|&(_, dz)| dz >= new_eps).unzip();
        Ok(JumpPath { horizon: self.horizon, cutoff: new_eps, times, sizes })
    }
}

/// Free-function form of [`JumpPath::value`].
pub fn path_value(path: &JumpPath, t: f64) -> Result<f64, DriverError> {
    path.value(t)
}

/// Free-function form of [`JumpPath::thin`].
pub fn thin_path(path: &JumpPath, new_eps: f64) -> Result<JumpPath, DriverError> {
    path.thin(new_eps)
}

/// Samples the driver truncated at `eps` on `(0, horizon]`.
///
/// The jumps `>= eps` form a compound Poisson process: the count is Poisson
/// with mean `horizon·λ(eps)`, times are uniform, sizes are Pareto with tail
/// `(eps/h)^α`.
pub fn sample_truncated_path<R: Rng + ?Sized>(
    params: &StableParams,
    horizon: f64,
    eps: f64,
    rng: &mut R,
) -> Result<JumpPath, DriverError> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(DriverError::InvalidHorizon(horizon));
    }
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(DriverError::InvalidCutoff(eps));
    }
    let mean = horizon * levy_tail_mass(params, eps)?;
    if mean > MAX_EXPECTED_EVENTS {
        return Err(DriverError::TooManyEvents(mean));
    }
    let count = if mean > 0.0 {
        let poisson = Poisson::new(mean).map_err(|_| DriverError::TooManyEvents(mean))?;
        let n: f64 = poisson.sample(rng);
        n as usize
    } else {
        0
    };

    // 1 - u lies in (0, 1], so every time lands in (0, T].
    let mut times: Vec<f64> = (0..count).map(|_| horizon * (1.0 - rng.random::<f64>())).collect();
    times.sort_unstable_by(f64::total_cmp);
    let inv_alpha = 1.0 / params.alpha;
    let raw_sizes = (0..count).map(|_| eps * libm::pow(1.0 - rng.random::<f64>(), -inv_alpha));

    // Coincident times have probability ~n²·2⁻⁵³; merge them so times stay
    // strictly increasing.
    let mut out_times: Vec<f64> = Vec::with_capacity(count);
    let mut out_sizes: Vec<f64> = Vec::with_capacity(count);
    for (t, dz) in times.into_iter().zip(raw_sizes) {
        match out_times.last() {
            Some(&last) if last == t => *out_sizes.last_mut().unwrap() += dz,
            _ => {
                out_times.push(t);
                out_sizes.push(dz);
            }
        }
    }
    Ok(JumpPath { horizon, cutoff: eps, times: out_times, sizes: out_sizes })
}

/// Draw from the standard positive stable law, `E e^{-λS} = e^{-λ^α}`.
///
/// Uses Kanter's representation, evaluated in log space so that small `α`
/// neither overflows nor underflows in the intermediate powers. For `α = 1/2`
/// the law is Lévy's, `S = 1 / (2 N²)`.
pub fn sample_standard_positive_stable<R: Rng + ?Sized>(alpha: f64, rng: &mut R) -> f64 {
    if alpha == 0.5 {
        let n: f64 = StandardNormal.sample(rng);
        return 0.5 / (n * n);
    }
    // u in (0, π), w in (0, ∞)
    let u = PI * (1.0 - rng.random::<f64>()).min(1.0 - f64::EPSILON);
    let w: f64 = Exp1.sample(rng);
    let log_s = libm::log(libm::sin(alpha * u)) - libm::log(libm::sin(u)) / alpha
        + (1.0 - alpha) / alpha * (libm::log(libm::sin((1.0 - alpha) * u)) - libm::log(w));
    libm::exp(log_s)
}

/// Exact sample of the increment `Z_dt`.
///
/// By self-similarity `Z_dt` has the law of `(κ·dt)^{1/α} S` with `ψ(λ) = κλ^α`.
pub fn sample_exact_increment<R: Rng + ?Sized>(
    params: &StableParams,
    dt: f64,
    rng: &mut R,
) -> Result<f64, DriverError> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(DriverError::InvalidStep(dt));
    }
    let scale = libm::pow(params.laplace_coefficient() * dt, 1.0 / params.alpha);
    Ok(scale * sample_standard_positive_stable(params.alpha, rng))
}

/// Exact-law increment sampler for a fixed step, with the scale precomputed.
#[derive(Debug, Clone, Copy)]
pub struct IncrementSampler {
    alpha: f64,
    scale: f64,
}

impl IncrementSampler {
    pub fn new(params: &StableParams, dt: f64) -> Result<Self, DriverError> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(DriverError::InvalidStep(dt));
        }
        let scale = libm::pow(params.laplace_coefficient() * dt, 1.0 / params.alpha);
        Ok(Self { alpha: params.alpha, scale })
    }

    #[inline]
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.scale * sample_standard_positive_stable(self.alpha, rng)
    }
}

/// Values of `Z` at `s_i = i·step`, `i = 0..=steps`, from exact increments.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPath {
    step: f64,
    values: Vec<f64>,
}

impl GridPath {
    pub fn sample<R: Rng + ?Sized>(
        params: &StableParams,
        horizon: f64,
        steps: usize,
        rng: &mut R,
    ) -> Result<Self, DriverError> {
        if !(horizon > 0.0 && horizon.is_finite()) {
            return Err(DriverError::InvalidHorizon(horizon));
        }
        if steps == 0 {
            return Err(DriverError::EmptyGrid);
        }
        let step = horizon / steps as f64;
        let sampler = IncrementSampler::new(params, step)?;
        let mut values = Vec::with_capacity(steps + 1);
        let mut z = 0.0;
        values.push(z);
        for _ in 0..steps {
            z += sampler.sample(rng);
            values.push(z);
        }
        Ok(Self { step, values })
    }

    /// Wraps externally produced grid values; `values[0]` must be 0 and the
    /// sequence non-decreasing.
    pub fn from_values(step: f64, values: Vec<f64>) -> Result<Self, DriverError> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(DriverError::InvalidStep(step));
        }
        if values.len() < 2 {
            return Err(DriverError::EmptyGrid);
        }
        if values[0] != 0.0 {
            return Err(DriverError::MalformedEvents("grid path must start at 0"));
        }
        if values.windows(2).any(|w| !(w[1] >= w[0]) || !w[1].is_finite()) {
            return Err(DriverError::MalformedEvents("grid values must be finite and non-decreasing"));
        }
        Ok(Self { step, values })
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn steps(&self) -> usize {
        self.values.len() - 1
    }

    pub fn horizon(&self) -> f64 {
        self.step * self.steps() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn time(&self, i: usize) -> f64 {
        self.step * i as f64
    }

    /// Keeps every `factor`-th grid point.
    pub fn coarsen(&self, factor: usize) -> Result<GridPath, DriverError> {
        if factor == 0 || !self.steps().is_multiple_of(factor) {
            return Err(DriverError::MalformedEvents("coarsening factor must divide the step count"));
        }
        let values = self.values.iter().copied().step_by(factor).collect();
        Ok(GridPath { step: self.step * factor as f64, values })
    }
}
