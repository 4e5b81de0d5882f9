//! Extended-real risk algebra, log loss, and the dominance partial order.
//!
//! Risks live in `[0, +inf]`. Infinity is a first-class value, never a
//! sentinel float: the dominance argument separating the Bayes predictive
//! from the plug-in is exactly about `+inf` versus finite, so comparisons
//! and sums are defined case by case.

use std::cmp::Ordering;
use std::fmt;
use std::ops::Add;

use crate::error::{LabError, Result};
use crate::scalar::Real;

// ---------------------------------------------------------------------------
// RiskValue
// ---------------------------------------------------------------------------

/// A nonnegative extended real: finite or `+inf`, totally ordered.
///
/// Invariants enforced at construction: finite payloads are `>= 0` and not
/// NaN. Addition saturates at infinity; `scale` uses the measure-theoretic
/// convention `0 * inf = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RiskValue<F> {
    Finite(F),
    Infinite,
}

impl<F: Real> RiskValue<F> {
    /// Wrap a finite nonnegative value.
    pub fn finite(v: F) -> Result<Self> {
        if v.is_nan() || v < F::zero() {
            return Err(LabError::domain(format!(
                "risk value must be a nonnegative real, got {v}"
            )));
        }
        if v.is_infinite() {
            return Ok(RiskValue::Infinite);
        }
        Ok(RiskValue::Finite(v))
    }

    pub fn infinite() -> Self {
        RiskValue::Infinite
    }

    pub fn zero() -> Self {
        RiskValue::Finite(F::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, RiskValue::Finite(_))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, RiskValue::Infinite)
    }

    /// The finite payload, if any.
    pub fn as_finite(&self) -> Option<F> {
        match self {
            RiskValue::Finite(v) => Some(*v),
            RiskValue::Infinite => None,
        }
    }

    /// The finite payload or a panic; for contexts that have already
    /// established finiteness.
    pub fn expect_finite(&self, what: &str) -> F {
        self.as_finite()
            .unwrap_or_else(|| panic!("expected finite risk: {what}"))
    }

    /// Collapse to the scalar's own representation (`F::infinity()` for
    /// the infinite element), for serialization.
    pub fn to_scalar(&self) -> F {
        match self {
            RiskValue::Finite(v) => *v,
            RiskValue::Infinite => F::infinity(),
        }
    }

    /// Multiply by a nonnegative weight, with `0 * inf = 0`.
    pub fn scale(&self, w: F) -> Self {
        match self {
            RiskValue::Finite(v) => RiskValue::Finite(*v * w),
            RiskValue::Infinite => {
                if w == F::zero() {
                    RiskValue::Finite(F::zero())
                } else {
                    RiskValue::Infinite
                }
            }
        }
    }

    /// Total order: finite values numerically, `+inf` above every finite.
    pub fn total_cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (RiskValue::Infinite, RiskValue::Infinite) => Ordering::Equal,
            (RiskValue::Infinite, RiskValue::Finite(_)) => Ordering::Greater,
            (RiskValue::Finite(_), RiskValue::Infinite) => Ordering::Less,
            (RiskValue::Finite(a), RiskValue::Finite(b)) => {
                a.partial_cmp(b).expect("risk values are never NaN")
            }
        }
    }
}

impl<F: Real> PartialOrd for RiskValue<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.total_cmp(other))
    }
}

impl<F: Real> Add for RiskValue<F> {
    type Output = RiskValue<F>;

    fn add(self, rhs: Self) -> Self::Output {
        match (self, rhs) {
            (RiskValue::Finite(a), RiskValue::Finite(b)) => RiskValue::Finite(a + b),
            _ => RiskValue::Infinite,
        }
    }
}

impl<F: Real> fmt::Display for RiskValue<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RiskValue::Finite(v) => write!(f, "{v}"),
            RiskValue::Infinite => write!(f, "inf"),
        }
    }
}

// Finite values serialize as numbers, infinity as the string "inf"
// (JSON numbers cannot carry it).
impl<F: Real + serde::Serialize> serde::Serialize for RiskValue<F> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RiskValue::Finite(v) => v.serialize(s),
            RiskValue::Infinite => s.serialize_str("inf"),
        }
    }
}

// ---------------------------------------------------------------------------
// Parameter space, risk vectors, priors
// ---------------------------------------------------------------------------

/// A finite, strictly increasing list of parameter values.
///
/// Bernoulli parameters must lie strictly inside `(0, 1)`; Gaussian means
/// may be arbitrary reals (`reals` constructor).
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteParamSpace<F> {
    thetas: Vec<F>,
}

impl<F: Real> FiniteParamSpace<F> {
    /// Bernoulli success probabilities, strictly inside `(0, 1)`.
    pub fn bernoulli(thetas: Vec<F>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(LabError::Empty("parameter space"));
        }
        for &t in &thetas {
            if !(t > F::zero() && t < F::one()) {
                return Err(LabError::domain(format!(
                    "Bernoulli parameter must lie in (0,1), got {t}"
                )));
            }
        }
        Self::check_increasing(&thetas)?;
        Ok(Self { thetas })
    }

    /// Arbitrary real parameters (location means), strictly increasing.
    pub fn reals(thetas: Vec<F>) -> Result<Self> {
        if thetas.is_empty() {
            return Err(LabError::Empty("parameter space"));
        }
        for &t in &thetas {
            if !t.is_finite() {
                return Err(LabError::domain("parameter must be finite".to_string()));
            }
        }
        Self::check_increasing(&thetas)?;
        Ok(Self { thetas })
    }

    fn check_increasing(thetas: &[F]) -> Result<()> {
        for w in thetas.windows(2) {
            if w[0] >= w[1] {
                return Err(LabError::domain(
                    "parameters must be strictly increasing".to_string(),
                ));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        false // nonempty by construction
    }

    pub fn thetas(&self) -> &[F] {
        &self.thetas
    }
}

/// Per-parameter risk profile: one extended-real risk per theta.
#[derive(Debug, Clone, PartialEq)]
pub struct RiskVector<F> {
    values: Vec<RiskValue<F>>,
}

impl<F: Real> RiskVector<F> {
    pub fn new(values: Vec<RiskValue<F>>) -> Result<Self> {
        if values.is_empty() {
            return Err(LabError::Empty("risk vector"));
        }
        Ok(Self { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn values(&self) -> &[RiskValue<F>] {
        &self.values
    }

    pub fn get(&self, j: usize) -> RiskValue<F> {
        self.values[j]
    }

    pub fn all_finite(&self) -> bool {
        self.values.iter().all(RiskValue::is_finite)
    }

    /// Coordinatewise `<=` with strict inequality somewhere, in the
    /// extended-real order. Two everywhere-infinite vectors are equal in
    /// every coordinate, hence neither dominates.
    pub fn dominates(&self, other: &Self) -> Result<bool> {
        if self.len() != other.len() {
            return Err(LabError::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        let mut strict = false;
        for (a, b) in self.values.iter().zip(other.values.iter()) {
            match a.total_cmp(b) {
                Ordering::Greater => return Ok(false),
                Ordering::Less => strict = true,
                Ordering::Equal => {}
            }
        }
        Ok(strict)
    }

    /// Prior-weighted total risk, in the extended reals (`0 * inf = 0`).
    pub fn weighted(&self, prior: &Prior<F>) -> Result<RiskValue<F>> {
        if prior.len() != self.len() {
            return Err(LabError::LengthMismatch {
                expected: self.len(),
                got: prior.len(),
            });
        }
        let mut acc = RiskValue::zero();
        for (v, &w) in self.values.iter().zip(prior.weights()) {
            acc = acc + v.scale(w);
        }
        Ok(acc)
    }
}

/// A probability vector over a finite parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct Prior<F> {
    weights: Vec<F>,
}

impl<F: Real> Prior<F> {
    /// Nonnegative weights summing to one within `1e-12` (scaled up by the
    /// scalar's epsilon so `f32` priors are constructible).
    pub fn new(weights: Vec<F>) -> Result<Self> {
        if weights.is_empty() {
            return Err(LabError::Empty("prior"));
        }
        let mut total = F::zero();
        for &w in &weights {
            if w.is_nan() || w < F::zero() {
                return Err(LabError::domain(format!(
                    "prior weight must be nonnegative, got {w}"
                )));
            }
            total += w;
        }
        let tol =
            F::from_f64_lossy(1e-12).max(F::epsilon() * F::from_count(8 * weights.len().max(1)));
        if (total - F::one()).abs() > tol {
            return Err(LabError::domain(format!(
                "prior weights must sum to 1, got {total}"
            )));
        }
        Ok(Self { weights })
    }

    /// The two-point prior `(w1, 1 - w1)`.
    pub fn two_point(w1: F) -> Result<Self> {
        if !(w1 >= F::zero() && w1 <= F::one()) {
            return Err(LabError::domain(format!(
                "prior weight must lie in [0,1], got {w1}"
            )));
        }
        Ok(Self {
            weights: vec![w1, F::one() - w1],
        })
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(LabError::Empty("prior"));
        }
        let w = F::one() / F::from_count(k);
        Ok(Self {
            weights: vec![w; k],
        })
    }

    pub fn point_mass(k: usize, j: usize) -> Result<Self> {
        if j >= k {
            return Err(LabError::param(format!("atom index {j} out of range {k}")));
        }
        let mut weights = vec![F::zero(); k];
        weights[j] = F::one();
        Ok(Self { weights })
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn weights(&self) -> &[F] {
        &self.weights
    }
}

// ---------------------------------------------------------------------------
// Losses
// ---------------------------------------------------------------------------

fn check_theta<F: Real>(theta: F) -> Result<()> {
    if !(theta > F::zero() && theta < F::one()) {
        return Err(LabError::domain(format!(
            "theta must lie in the open interval (0,1), got {theta}"
        )));
    }
    Ok(())
}

fn check_prob<F: Real>(p: F) -> Result<()> {
    if !(p >= F::zero() && p <= F::one()) {
        return Err(LabError::domain(format!(
            "probability must lie in [0,1], got {p}"
        )));
    }
    Ok(())
}

/// Expected log loss of forecasting `p` when outcomes are Bernoulli(theta):
/// `-theta ln p - (1-theta) ln(1-p)`.
///
/// Returns `+inf` exactly when the forecast puts zero mass on an outcome of
/// positive probability, i.e. `p = 0` (theta > 0) or `p = 1` (theta < 1).
pub fn log_loss<F: Real>(theta: F, p: F) -> Result<RiskValue<F>> {
    check_theta(theta)?;
    check_prob(p)?;
    if p == F::zero() || p == F::one() {
        // theta is strictly interior, so the excluded outcome has
        // positive probability.
        return Ok(RiskValue::Infinite);
    }
    let v = -(theta * p.ln()) - (F::one() - theta) * (F::one() - p).ln();
    RiskValue::finite(v.max(F::zero()))
}

/// Binary entropy `H(theta) = -theta ln theta - (1-theta) ln(1-theta)`;
/// equals `log_loss(theta, theta)`.
pub fn binary_entropy<F: Real>(theta: F) -> Result<F> {
    check_theta(theta)?;
    Ok(-(theta * theta.ln()) - (F::one() - theta) * (F::one() - theta).ln())
}

/// Excess of the log loss over the entropy floor: the Bernoulli
/// KL divergence `KL(theta || p)`, infinite exactly when the loss is.
pub fn kl_excess<F: Real>(theta: F, p: F) -> Result<RiskValue<F>> {
    let loss = log_loss(theta, p)?;
    let h = binary_entropy(theta)?;
    Ok(match loss {
        RiskValue::Finite(l) => RiskValue::Finite((l - h).max(F::zero())),
        RiskValue::Infinite => RiskValue::Infinite,
    })
}
