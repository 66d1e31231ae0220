//! Coefficient functions `φ`.
//!
//! Only closed-form families are offered. For these continuity holds by
//! construction and monotonicity and positivity reduce to checks on the
//! parameters, so whether a given `φ` is continuous, non-decreasing and
//! positive on all of ℝ can be decided exactly. The `power(β)` family is the
//! deliberate exception: it vanishes at the origin and lives on `[0, ∞)`.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::FRAC_PI_2;
use core::fmt;
use core::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhiError {
    #[error("parameter {name} must be finite, got {value}")]
    NonFiniteParameter { name: &'static str, value: f64 },
    #[error("power exponent must be positive, got {0}")]
    InvalidExponent(f64),
    #[error("piecewise-linear needs at least one knot")]
    NoKnots,
    #[error("knot abscissae must be strictly increasing (knot {0})")]
    UnsortedKnots(usize),
    #[error("knot values must be non-decreasing (segment ending at knot {0} decreases)")]
    DecreasingKnots(usize),
    #[error("{x} is outside the domain [0, ∞) of the power family")]
    OutOfDomain { x: f64 },
    #[error("cannot evaluate φ at non-finite x = {0}")]
    NonFiniteArgument(f64),
    #[error("φ({x}) = 0 raised to negative exponent {exponent}: singular clock")]
    SingularClock { x: f64, exponent: f64 },
    #[error("φ({x}) = {value} is negative; fractional powers are undefined")]
    NegativeValue { x: f64, value: f64 },
    #[error("cannot parse φ specification {0:?}")]
    Parse(String),
}

/// The parametric families.
#[derive(Debug, Clone, PartialEq)]
pub enum PhiFamily {
    /// `x ↦ a`
    Constant { a: f64 },
    /// `x ↦ a + b (arctan x + π/2)`, ranging over `(a, a + bπ)`.
    ShiftedArctan { a: f64, b: f64 },
    /// `x ↦ a + b max(x, 0)`
    SoftRamp { a: f64, b: f64 },
    /// Linear interpolation through `(x_i, y_i)`, constant outside the knots.
    PiecewiseLinear { knots: Vec<(f64, f64)> },
    /// `x ↦ x^β` on `[0, ∞)`.
    Power { beta: f64 },
}

/// Where `φ` may be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    Real,
    NonNegative,
}

/// Which clauses of the standing assumption hold: continuity,
/// monotonicity and strict positivity of `φ` on ℝ.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationReport {
    pub continuous: bool,
    pub non_decreasing: bool,
    pub positive: bool,
    pub domain: Domain,
    pub assumption_ok: bool,
}

impl ValidationReport {
    fn new(continuous: bool, non_decreasing: bool, positive: bool, domain: Domain) -> Self {
        let assumption_ok = continuous && non_decreasing && positive && domain == Domain::Real;
        Self { continuous, non_decreasing, positive, domain, assumption_ok }
    }
}

fn finite(name: &'static str, value: f64) -> Result<(), PhiError> {
    if value.is_finite() {
        Ok(())
    } else {
        Err(PhiError::NonFiniteParameter { name, value })
    }
}

/// Checks a family's parameters and reports the assumption clauses.
///
/// Malformed parameters (non-finite values, unsorted or decreasing knots, a
/// non-positive power) are errors; a family that is well formed but fails a
/// clause is reported, not rejected.
pub fn validate(family: &PhiFamily) -> Result<ValidationReport, PhiError> {
    match family {
        PhiFamily::Constant { a } => {
            finite("a", *a)?;
            Ok(ValidationReport::new(true, true, *a > 0.0, Domain::Real))
        }
        PhiFamily::ShiftedArctan { a, b } | PhiFamily::SoftRamp { a, b } => {
            finite("a", *a)?;
            finite("b", *b)?;
            Ok(ValidationReport::new(true, *b >= 0.0, *a > 0.0 && *b >= 0.0, Domain::Real))
        }
        PhiFamily::PiecewiseLinear { knots } => {
            if knots.is_empty() {
                return Err(PhiError::NoKnots);
            }
            for &(x, y) in knots {
                finite("knot x", x)?;
                finite("knot y", y)?;
            }
            for (i, w) in knots.windows(2).enumerate() {
                if !(w[1].0 > w[0].0) {
                    return Err(PhiError::UnsortedKnots(i + 1));
                }
                if w[1].1 < w[0].1 {
                    return Err(PhiError::DecreasingKnots(i + 1));
                }
            }
            // Non-decreasing, so the infimum is the first knot value.
            Ok(ValidationReport::new(true, true, knots[0].1 > 0.0, Domain::Real))
        }
        PhiFamily::Power { beta } => {
            finite("beta", *beta)?;
            if *beta <= 0.0 {
                return Err(PhiError::InvalidExponent(*beta));
            }
            Ok(ValidationReport::new(true, true, false, Domain::NonNegative))
        }
    }
}

/// A validated coefficient function.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotonePhi {
    family: PhiFamily,
    report: ValidationReport,
}

impl MonotonePhi {
    pub fn new(family: PhiFamily) -> Result<Self, PhiError> {
        let report = validate(&family)?;
        Ok(Self { family, report })
    }

    pub fn constant(a: f64) -> Result<Self, PhiError> {
        Self::new(PhiFamily::Constant { a })
    }

    pub fn shifted_arctan(a: f64, b: f64) -> Result<Self, PhiError> {
        Self::new(PhiFamily::ShiftedArctan { a, b })
    }

    pub fn soft_ramp(a: f64, b: f64) -> Result<Self, PhiError> {
        Self::new(PhiFamily::SoftRamp { a, b })
    }

    pub fn piecewise_linear(knots: Vec<(f64, f64)>) -> Result<Self, PhiError> {
        Self::new(PhiFamily::PiecewiseLinear { knots })
    }

    pub fn power(beta: f64) -> Result<Self, PhiError> {
        Self::new(PhiFamily::Power { beta })
    }

    pub fn family(&self) -> &PhiFamily {
        &self.family
    }

    pub fn report(&self) -> &ValidationReport {
        &self.report
    }

    pub fn assumption_ok(&self) -> bool {
        self.report.assumption_ok
    }

    /// Least upper bound of `φ` over its domain, if finite.
    pub fn supremum(&self) -> Option<f64> {
        match &self.family {
            PhiFamily::Constant { a } => Some(*a),
            PhiFamily::ShiftedArctan { a, b } => Some(a + b * core::f64::consts::PI),
            PhiFamily::SoftRamp { a, b } => (*b <= 0.0).then_some(*a),
            PhiFamily::PiecewiseLinear { knots } => knots.last().map(|k| k.1),
            PhiFamily::Power { .. } => None,
        }
    }

    /// `φ(x)`.
    pub fn eval(&self, x: f64) -> Result<f64, PhiError> {
        if !x.is_finite() {
            return Err(PhiError::NonFiniteArgument(x));
        }
        Ok(match &self.family {
            PhiFamily::Constant { a } => *a,
            PhiFamily::ShiftedArctan { a, b } => a + b * (libm::atan(x) + FRAC_PI_2),
            PhiFamily::SoftRamp { a, b } => a + b * x.max(0.0),
            PhiFamily::PiecewiseLinear { knots } => interpolate(knots, x),
            PhiFamily::Power { beta } => {
                if x < 0.0 {
                    return Err(PhiError::OutOfDomain { x });
                }
                libm::pow(x, *beta)
            }
        })
    }

    /// `φ(x)^exponent`, as used by the additive clocks `∫ φ(X_s)^{±α} ds`.
    ///
    /// A zero value with a negative exponent is reported as
    /// [`PhiError::SingularClock`].
    pub fn eval_pow(&self, x: f64, exponent: f64) -> Result<f64, PhiError> {
        let value = self.eval(x)?;
        if exponent == 1.0 {
            return Ok(value);
        }
        if value == 0.0 && exponent < 0.0 {
            return Err(PhiError::SingularClock { x, exponent });
        }
        if value < 0.0 {
            return Err(PhiError::NegativeValue { x, value });
        }
        Ok(libm::pow(value, exponent))
    }
}

fn interpolate(knots: &[(f64, f64)], x: f64) -> f64 {
    let first = knots[0];
    let last = knots[knots.len() - 1];
    if x <= first.0 {
        return first.1;
    }
    if x >= last.0 {
        return last.1;
    }
    // knots[i-1].0 < x < knots[i].0
    let i = knots.partition_point(|k| k.0 <= x);
    let (x0, y0) = knots[i - 1];
    let (x1, y1) = knots[i];
    let w = (x - x0) / (x1 - x0);
    // Capping at y1 keeps the rounded interpolant monotone across knots.
    (y0 + (y1 - y0) * w).min(y1)
}

impl fmt::Display for PhiFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PhiFamily::Constant { a } => write!(f, "constant({a})"),
            PhiFamily::ShiftedArctan { a, b } => write!(f, "shifted-arctan({a},{b})"),
            PhiFamily::SoftRamp { a, b } => write!(f, "soft-ramp({a},{b})"),
            PhiFamily::PiecewiseLinear { knots } => {
                f.write_str("piecewise-linear(")?;
                for (i, (x, y)) in knots.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}:{y}")?;
                }
                f.write_str(")")
            }
            PhiFamily::Power { beta } => write!(f, "power({beta})"),
        }
    }
}

impl fmt::Display for MonotonePhi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.family.fmt(f)
    }
}

impl FromStr for PhiFamily {
    type Err = PhiError;

    /// Parses `name(arg,...)`, e.g. `shifted-arctan(2,0.6366)` or
    /// `piecewise-linear(0:1,2:3)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || PhiError::Parse(String::from(s));
        let s = s.trim();
        let open = s.find('(').ok_or_else(err)?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(err)?;
        let name = s[..open].trim();
        let args: Vec<&str> = inner.split(',').map(str::trim).collect();
        let num = |t: &str| t.parse::<f64>().map_err(|_| err());
        let nums = || args.iter().map(|a| num(a)).collect::<Result<Vec<f64>, _>>();
        match name {
            "constant" => match nums()?[..] {
                [a] => Ok(PhiFamily::Constant { a }),
                _ => Err(err()),
            },
            "shifted-arctan" => match nums()?[..] {
                [a, b] => Ok(PhiFamily::ShiftedArctan { a, b }),
                _ => Err(err()),
            },
            "soft-ramp" => match nums()?[..] {
                [a, b] => Ok(PhiFamily::SoftRamp { a, b }),
                _ => Err(err()),
            },
            "power" => match nums()?[..] {
                [beta] => Ok(PhiFamily::Power { beta }),
                _ => Err(err()),
            },
            "piecewise-linear" => {
                let knots = args
                    .iter()
                    .map(|a| {
                        let (x, y) = a.split_once(':').ok_or_else(err)?;
                        Ok((num(x.trim())?, num(y.trim())?))
                    })
                    .collect::<Result<Vec<_>, PhiError>>()?;
                Ok(PhiFamily::PiecewiseLinear { knots })
            }
            _ => Err(err()),
        }
    }
}

impl FromStr for MonotonePhi {
    type Err = PhiError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MonotonePhi::new(s.parse()?)
    }
}
