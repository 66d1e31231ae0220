//! Experiment configuration: a flat TOML file with strict keys.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use stable_sde_core::counterexample::{MIN_GRID_PER_UNIT, MIN_REPLICATES};
use stable_sde_core::MonotonePhi;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("malformed config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid `{key}`: {reason}")]
    Invalid { key: &'static str, reason: String },
}

fn invalid(key: &'static str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key, reason: reason.into() }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    StrongConstruct,
    LadderMonotone,
    WeakAgree,
    UniquenessCouple,
    Counterexample,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::StrongConstruct => "strong-construct",
            Experiment::LadderMonotone => "ladder-monotone",
            Experiment::WeakAgree => "weak-agree",
            Experiment::UniquenessCouple => "uniqueness-couple",
            Experiment::Counterexample => "counterexample",
        })
    }
}

/// All keys of the config file. Keys not listed here are rejected.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default = "defaults::alpha")]
    pub alpha: f64,
    /// Exponent of `φ(x) = x^β`; counterexample only.
    #[serde(default)]
    pub beta: Option<f64>,
    /// Lévy density scale; `α/Γ(1-α)` when absent.
    #[serde(default)]
    pub c: Option<f64>,
    #[serde(default = "defaults::phi")]
    pub phi: String,
    #[serde(default)]
    pub x0: f64,
    /// Time horizon of the solution.
    #[serde(rename = "T", default = "defaults::one")]
    pub horizon: f64,
    /// Truncation levels, coarsest first.
    #[serde(default = "defaults::cutoffs")]
    pub cutoffs: Vec<f64>,
    /// Truncation level for weak-agree.
    #[serde(default = "defaults::eps")]
    pub eps: f64,
    /// Horizon of the driver fed to the time change (weak-agree) or of `Z`
    /// (counterexample). Derived from `φ` when absent.
    #[serde(default)]
    pub driver_horizon: Option<f64>,
    /// Counterexample grid points per unit time.
    #[serde(default = "defaults::grid_m")]
    pub grid_m: usize,
    #[serde(default = "defaults::replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub out: Option<PathBuf>,
    #[serde(default = "defaults::ks_threshold")]
    pub ks_threshold: f64,
    /// uniqueness-couple: required final/first median ratio.
    #[serde(default = "defaults::ratio_threshold")]
    pub ratio_threshold: f64,
    /// counterexample: required fraction of covered runs with `X_1 > 0`.
    #[serde(default = "defaults::positive_threshold")]
    pub positive_threshold: f64,
    /// counterexample: required fraction of runs whose clock reaches 1.
    #[serde(default = "defaults::coverage_threshold")]
    pub coverage_threshold: f64,
    #[serde(default = "defaults::one")]
    pub t1: f64,
    #[serde(default = "defaults::two")]
    pub t2: f64,
    /// counterexample: times for the `P(B_t <= M)` curve (skipped if empty).
    #[serde(default)]
    pub divergence_times: Vec<f64>,
    #[serde(default = "defaults::divergence_level")]
    pub divergence_level: f64,
}

mod defaults {
    pub fn alpha() -> f64 {
        0.5
    }
    pub fn phi() -> String {
        "shifted-arctan(2,0.6366)".into()
    }
    pub fn one() -> f64 {
        1.0
    }
    pub fn two() -> f64 {
        2.0
    }
    pub fn cutoffs() -> Vec<f64> {
        vec![0.1, 0.03, 0.01, 0.003, 0.001]
    }
    pub fn eps() -> f64 {
        1e-3
    }
    pub fn grid_m() -> usize {
        10_000
    }
    pub fn replicates() -> usize {
        1000
    }
    pub fn ks_threshold() -> f64 {
        0.01
    }
    pub fn ratio_threshold() -> f64 {
        0.1
    }
    pub fn positive_threshold() -> f64 {
        0.99
    }
    pub fn coverage_threshold() -> f64 {
        0.8
    }
    pub fn divergence_level() -> f64 {
        5.0
    }
}

/// Default horizon of `Z` in the counterexample; enough for about 99%
/// coverage at `t = 1` when `α = β = 1/2`.
pub const DEFAULT_COUNTEREXAMPLE_HORIZON: f64 = 3.0;

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text =
            std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_owned(), source })?;
        Self::from_toml(&text)
    }

    pub fn phi(&self) -> Result<MonotonePhi, ConfigError> {
        self.phi.parse().map_err(|e| invalid("phi", format!("{e}")))
    }

    pub fn beta(&self) -> Result<f64, ConfigError> {
        self.beta.ok_or_else(|| invalid("beta", "required by the counterexample"))
    }

    /// Horizon of the driver used by the time change or the counterexample.
    pub fn driver_horizon(&self) -> Result<f64, ConfigError> {
        if let Some(h) = self.driver_horizon {
            return Ok(h);
        }
        match self.experiment {
            Experiment::Counterexample => Ok(DEFAULT_COUNTEREXAMPLE_HORIZON),
            // B grows at rate φ^{-α} >= sup φ^{-α}, so this reaches T.
            _ => match self.phi()?.supremum() {
                Some(sup) => Ok(1.01 * self.horizon * sup.powf(self.alpha)),
                None => Err(invalid("driver_horizon", "required when φ is unbounded")),
            },
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let unit = |key, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(invalid(key, format!("must lie in (0, 1), got {v}")))
            }
        };
        let positive = |key, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(key, format!("must be positive and finite, got {v}")))
            }
        };
        unit("alpha", self.alpha)?;
        unit("ks_threshold", self.ks_threshold)?;
        unit("ratio_threshold", self.ratio_threshold)?;
        unit("coverage_threshold", self.coverage_threshold)?;
        if !(self.positive_threshold > 0.0 && self.positive_threshold <= 1.0) {
            return Err(invalid("positive_threshold", "must lie in (0, 1]"));
        }
        if let Some(c) = self.c {
            positive("c", c)?;
        }
        positive("T", self.horizon)?;
        positive("eps", self.eps)?;
        if !self.x0.is_finite() {
            return Err(invalid("x0", "must be finite"));
        }
        if let Some(h) = self.driver_horizon {
            positive("driver_horizon", h)?;
        }
        if self.replicates == 0 {
            return Err(invalid("replicates", "must be at least 1"));
        }
        if self.cutoffs.is_empty()
            || !self.cutoffs.iter().all(|&e| e > 0.0 && e.is_finite())
            || !self.cutoffs.windows(2).all(|w| w[1] < w[0])
        {
            return Err(invalid("cutoffs", "need at least one positive value, strictly decreasing"));
        }
        match self.experiment {
            Experiment::Counterexample => {
                unit("beta", self.beta()?)?;
                if self.c.is_some() {
                    return Err(invalid("c", "the counterexample uses the standard scale α/Γ(1-α)"));
                }
                if self.grid_m < MIN_GRID_PER_UNIT {
                    return Err(invalid("grid_m", format!("must be at least {MIN_GRID_PER_UNIT}")));
                }
                if self.replicates < MIN_REPLICATES {
                    return Err(invalid("replicates", format!("the counterexample needs at least {MIN_REPLICATES}")));
                }
                positive("t1", self.t1)?;
                if !(self.t2 >= self.t1 && self.t2.is_finite()) {
                    return Err(invalid("t2", "must be finite and at least t1"));
                }
                if !self.divergence_times.iter().all(|&t| t > 0.0 && t.is_finite())
                    || !self.divergence_times.windows(2).all(|w| w[1] > w[0])
                {
                    return Err(invalid("divergence_times", "must be positive and strictly increasing"));
                }
                if self.divergence_level.is_nan() {
                    return Err(invalid("divergence_level", "must not be NaN"));
                }
            }
            _ => {
                if self.beta.is_some() {
                    return Err(invalid("beta", format!("only used by the counterexample, not {}", self.experiment)));
                }
                let phi = self.phi()?;
                if !phi.assumption_ok() {
                    return Err(invalid("phi", format!("{phi} is not positive, continuous and non-decreasing")));
                }
                if self.experiment == Experiment::WeakAgree {
                    self.driver_horizon()?;
                }
            }
        }
        Ok(())
    }
}
