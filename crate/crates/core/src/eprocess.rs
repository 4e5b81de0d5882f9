//! Likelihood-ratio e-process for testing a point Bernoulli null, with
//! Ville stopping, the naive-peeking comparator, and the type-I-error
//! experiment.
//!
//! The running value is the product of per-step factors
//! `(p_hat / theta0)^x ((1 - p_hat) / (1 - theta0))^(1 - x)` where
//! `p_hat` is the conjugate plug-in predictive computed before each
//! outcome. Factors sum to one under the null at every lattice node, so
//! the process is a nonnegative martingale under H0.

use rand::Rng;
use serde::Serialize;

use crate::bernoulli::ConjugatePredictor;
use crate::error::{LabError, Result};
use crate::harness::{run_replications, McConfig};
use crate::numeric::normal_quantile;
use crate::scalar::Real;

// ---------------------------------------------------------------------------
// EProcessState
// ---------------------------------------------------------------------------

/// Running e-process state. Immutable: updates return a new state.
///
/// The value is held in log space so long favorable runs cannot
/// overflow; `value()` exponentiates on demand and `audit_value()`
/// recomputes the product in closed form from `(s, t)` alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EProcessState<F> {
    log_value: F,
    t: usize,
    s: usize,
    theta0: F,
    predictor: ConjugatePredictor<F>,
}

impl<F: Real> EProcessState<F> {
    /// Fresh process at `E_0 = 1` testing `H0: theta = theta0`, with the
    /// given conjugate predictor as the alternative plug-in.
    pub fn new(theta0: F, predictor: ConjugatePredictor<F>) -> Result<Self> {
        if !(theta0 > F::zero() && theta0 < F::one()) {
            return Err(LabError::domain(format!(
                "null probability must lie in (0,1), got {theta0}"
            )));
        }
        Ok(Self {
            log_value: F::zero(),
            t: 0,
            s: 0,
            theta0,
            predictor,
        })
    }

    pub fn value(&self) -> F {
        self.log_value.exp()
    }

    pub fn log_value(&self) -> F {
        self.log_value
    }

    pub fn steps(&self) -> usize {
        self.t
    }

    pub fn successes(&self) -> usize {
        self.s
    }

    pub fn theta0(&self) -> F {
        self.theta0
    }

    /// Incorporate one outcome: multiply by the likelihood ratio of the
    /// plug-in predictive (computed before seeing `x`) against the null.
    pub fn update(&self, x: bool) -> Self {
        let p_hat = self
            .predictor
            .predict(self.s, self.t)
            .expect("state counts are consistent");
        let log_factor = if x {
            (p_hat / self.theta0).ln()
        } else {
            ((F::one() - p_hat) / (F::one() - self.theta0)).ln()
        };
        Self {
            log_value: self.log_value + log_factor,
            t: self.t + 1,
            s: self.s + usize::from(x),
            theta0: self.theta0,
            predictor: self.predictor,
        }
    }

    /// The product recomputed in closed form from the sufficient
    /// statistic: the conjugate marginal likelihood of the path over the
    /// null likelihood. Audit route, independent of the running sum.
    pub fn audit_value(&self) -> F {
        let (a, b) = self.predictor.pseudo_counts();
        // numerator: prod_{i<s}(a+i) * prod_{i<t-s}(b+i) / prod_{i<t}(a+b+i)
        let mut log_num = F::zero();
        for i in 0..self.s {
            log_num += (a + F::from_count(i)).ln();
        }
        for i in 0..(self.t - self.s) {
            log_num += (b + F::from_count(i)).ln();
        }
        let mut log_den = F::zero();
        for i in 0..self.t {
            log_den += (a + b + F::from_count(i)).ln();
        }
        let log_null = F::from_count(self.s) * self.theta0.ln()
            + F::from_count(self.t - self.s) * (F::one() - self.theta0).ln();
        (log_num - log_den - log_null).exp()
    }

    /// Ville rejection at level `alpha`: true iff the value has reached
    /// `1/alpha` (inclusive threshold).
    pub fn ville_reject(&self, alpha: F) -> Result<bool> {
        if !(alpha > F::zero() && alpha < F::one()) {
            return Err(LabError::domain(format!(
                "level must lie in (0,1), got {alpha}"
            )));
        }
        // compare in log space: E >= 1/alpha  <=>  log E >= -ln(alpha)
        Ok(self.log_value >= -alpha.ln())
    }
}

/// Max over lattice nodes `(s, t)`, `t <= depth`, of the one-step
/// martingale defect under the null, computed the long way through the
/// two likelihood-ratio factors:
/// `|theta0 (p/theta0) + (1-theta0)((1-p)/(1-theta0)) - 1|`.
pub fn eprocess_martingale_deviation<F: Real>(
    theta0: F,
    predictor: &ConjugatePredictor<F>,
    depth: usize,
) -> Result<F> {
    if depth < 1 {
        return Err(LabError::param("depth must be >= 1".to_string()));
    }
    if !(theta0 > F::zero() && theta0 < F::one()) {
        return Err(LabError::domain(format!(
            "null probability must lie in (0,1), got {theta0}"
        )));
    }
    let one = F::one();
    let mut worst = F::zero();
    for t in 0..=depth {
        for s in 0..=t {
            let p = predictor.predict(s, t)?;
            let mean = theta0 * (p / theta0) + (one - theta0) * ((one - p) / (one - theta0));
            worst = worst.max((mean - one).abs());
        }
    }
    Ok(worst)
}

/// Fixed-sample z-tests at each look with no multiplicity correction:
/// rejects iff any look `n` has `|S_n/n - 1/2| / sqrt(1/(4n))` beyond the
/// two-sided critical value at `alpha` per look.
pub fn naive_peeking_test(xs: &[bool], looks: &[usize], alpha: f64) -> Result<bool> {
    if looks.is_empty() {
        return Err(LabError::Empty("looks"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(LabError::domain(format!(
            "level must lie in (0,1), got {alpha}"
        )));
    }
    for w in looks.windows(2) {
        if w[0] >= w[1] {
            return Err(LabError::param(
                "looks must be strictly ascending".to_string(),
            ));
        }
    }
    if looks[0] == 0 {
        return Err(LabError::param("looks must be >= 1".to_string()));
    }
    let &max_look = looks.last().expect("nonempty");
    if max_look > xs.len() {
        return Err(LabError::param(format!(
            "look {max_look} outside the observed sequence of length {}",
            xs.len()
        )));
    }
    let crit = normal_quantile(1.0 - alpha / 2.0)?;
    let mut s = 0usize;
    let mut pos = 0usize;
    for &look in looks {
        while pos < look {
            s += usize::from(xs[pos]);
            pos += 1;
        }
        let n = look as f64;
        let z = (s as f64 / n - 0.5).abs() / (0.25 / n).sqrt();
        if z > crit {
            return Ok(true);
        }
    }
    Ok(false)
}

// ---------------------------------------------------------------------------
// Type-I-error experiment
// ---------------------------------------------------------------------------

/// Configuration of the sequential type-I-error experiment.
#[derive(Debug, Clone, Serialize)]
pub struct SequentialTestConfig {
    pub mc: McConfig,
    /// Null (and data-generating) success probability.
    pub theta0: f64,
    pub horizon: usize,
    pub looks: Vec<usize>,
    pub alpha: f64,
    /// Monitor the e-process at every step (anytime-valid reading) or
    /// only at the look times.
    pub monitor_every_step: bool,
}

impl SequentialTestConfig {
    pub fn paper_defaults(seed: u64, reps: usize) -> Result<Self> {
        Ok(Self {
            mc: McConfig::new(seed, reps)?,
            theta0: 0.5,
            horizon: 200,
            looks: vec![10, 20, 50, 100, 200],
            alpha: 0.05,
            monitor_every_step: true,
        })
    }

    fn validate(&self) -> Result<()> {
        if !(self.theta0 > 0.0 && self.theta0 < 1.0) {
            return Err(LabError::domain(format!(
                "theta0 must lie in (0,1), got {}",
                self.theta0
            )));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(LabError::domain(format!(
                "alpha must lie in (0,1), got {}",
                self.alpha
            )));
        }
        if self.horizon == 0 {
            return Err(LabError::param("horizon must be >= 1".to_string()));
        }
        if self.looks.is_empty() {
            return Err(LabError::Empty("looks"));
        }
        if self.looks[0] == 0 {
            return Err(LabError::param("looks must be >= 1".to_string()));
        }
        for w in self.looks.windows(2) {
            if w[0] >= w[1] {
                return Err(LabError::param(
                    "looks must be strictly ascending".to_string(),
                ));
            }
        }
        if *self.looks.last().expect("nonempty") > self.horizon {
            return Err(LabError::param(
                "looks must not exceed the horizon".to_string(),
            ));
        }
        Ok(())
    }
}

/// Rejection rates of the two strategies under the null.
#[derive(Debug, Clone, Serialize)]
pub struct SequentialTestReport {
    pub eprocess_rate: f64,
    pub naive_rate: f64,
    pub reps: usize,
    pub seed: u64,
    pub alpha: f64,
}

/// Run the experiment: per replication, an i.i.d. Bernoulli(theta0) path;
/// the e-process rejects on any Ville crossing (per the monitoring mode),
/// naive peeking on any per-look z exceedance.
pub fn run_sequential_test(cfg: &SequentialTestConfig) -> Result<SequentialTestReport> {
    cfg.validate()?;
    let results = run_replications(cfg.mc, |_, rng| {
        let xs: Vec<bool> = (0..cfg.horizon)
            .map(|_| rng.gen::<f64>() < cfg.theta0)
            .collect();
        let mut state = EProcessState::new(cfg.theta0, ConjugatePredictor::jeffreys())
            .expect("validated theta0");
        let mut e_reject = false;
        for (t, &x) in xs.iter().enumerate() {
            state = state.update(x);
            let monitored = cfg.monitor_every_step || cfg.looks.contains(&(t + 1));
            if monitored && state.ville_reject(cfg.alpha).expect("validated alpha") {
                e_reject = true;
            }
        }
        let naive = naive_peeking_test(&xs, &cfg.looks, cfg.alpha).expect("validated looks");
        (e_reject, naive)
    });
    let b = results.len() as f64;
    let e_rate = results.iter().filter(|r| r.0).count() as f64 / b;
    let naive_rate = results.iter().filter(|r| r.1).count() as f64 / b;
    Ok(SequentialTestReport {
        eprocess_rate: e_rate,
        naive_rate,
        reps: cfg.mc.reps,
        seed: cfg.mc.seed,
        alpha: cfg.alpha,
    })
}

/// One simulated e-process trajectory `(t, E_t)` under Bernoulli(theta),
/// for plotting.
pub fn sample_trajectory(
    theta0: f64,
    theta_true: f64,
    horizon: usize,
    seed: u64,
) -> Result<Vec<(usize, f64)>> {
    if !(theta_true > 0.0 && theta_true < 1.0) {
        return Err(LabError::domain(format!(
            "theta must lie in (0,1), got {theta_true}"
        )));
    }
    let mut rng = crate::harness::derive_substream(seed, 0);
    let mut state = EProcessState::new(theta0, ConjugatePredictor::<f64>::jeffreys())?;
    let mut out = Vec::with_capacity(horizon + 1);
    out.push((0, 1.0));
    for t in 1..=horizon {
        state = state.update(rng.gen::<f64>() < theta_true);
        out.push((t, state.value()));
    }
    Ok(out)
}
