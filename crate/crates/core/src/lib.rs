//! Event-driven simulation of `dX_t = φ(X_{t-}) dZ_t` where `Z` is a stable
//! subordinator of order `α ∈ (0, 1)`.
//!
//! The crate is `no_std` (with `alloc`). Everything here is a pure function of
//! its inputs and an explicit random stream; IO, configuration and the CLI
//! live in the `stable-sde-lab` crate.
//!
//! * [`driver`]: truncated and exact-increment paths of `Z`, thinning.
//! * [`phi`]: the coefficient families and their validation.
//! * [`truncation`]: the exact finite-activity solver and truncation ladders.
//! * [`clock`] and [`time_change`]: additive clocks, right inverses and the
//!   time-changed construction `X_t = x + Z̃_{τ_t}`.
//! * [`counterexample`]: the degenerate `φ(x) = x^β` case started from zero.
//! * [`stats`]: empirical CDFs and the two-sample Kolmogorov-Smirnov test.
//! * [`seed`]: deterministic seed derivation and replicate execution.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod clock;
pub mod counterexample;
pub mod driver;
pub mod phi;
pub mod seed;
pub mod stats;
pub mod time_change;
pub mod truncation;

pub use clock::{Clock, ClockError, ClockInverse};
pub use counterexample::{CounterexampleConfig, CounterexampleError, CounterexampleRun};
pub use driver::{DriverError, GridPath, JumpPath, StableParams};
pub use phi::{MonotonePhi, PhiError, PhiFamily, ValidationReport};
pub use seed::{derive_seed, rng_for, Replicator, Sequential, SimRng, StreamTag};
pub use stats::{KsReport, SampleSet, StatsError};
pub use time_change::{TimeChangeError, TimeChangeRun};
pub use truncation::{Ladder, SolutionEvent, SolutionPath, SolveError, SolverOptions};
