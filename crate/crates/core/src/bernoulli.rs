//! Canonical Bernoulli predictors and their exact diagnostics: the
//! conjugate Beta predictive, the plug-in empirical frequency, exact
//! martingale checks on the count lattice, the plug-in dominance
//! certificate, and the average-log-loss experiment.

use rand::Rng;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::geometry::{exact_risk, PredictiveRule};
use crate::harness::{pairwise_sum, run_replications, McConfig};
use crate::risk::{log_loss, RiskValue};
use crate::scalar::Real;

// ---------------------------------------------------------------------------
// Predictors
// ---------------------------------------------------------------------------

/// Beta(a, b) conjugate predictor: forecasts the posterior mean
/// `(s + a) / (n + a + b)` after `s` successes in `n` trials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConjugatePredictor<F> {
    a: F,
    b: F,
}

impl<F: Real> ConjugatePredictor<F> {
    pub fn new(a: F, b: F) -> Result<Self> {
        if a.is_nan() || b.is_nan() || a <= F::zero() || b <= F::zero() {
            return Err(LabError::domain(format!(
                "Beta pseudo-counts must be positive, got a={a}, b={b}"
            )));
        }
        Ok(Self { a, b })
    }

    /// The Beta(1/2, 1/2) predictor `(s + 1/2) / (n + 1)`.
    pub fn jeffreys() -> Self {
        let half = F::from_f64_lossy(0.5);
        Self { a: half, b: half }
    }

    /// The Beta(1, 1) predictor `(s + 1) / (n + 2)`.
    pub fn laplace() -> Self {
        Self {
            a: F::one(),
            b: F::one(),
        }
    }

    pub fn pseudo_counts(&self) -> (F, F) {
        (self.a, self.b)
    }

    /// Predicted success probability; strictly inside `(0, 1)`.
    pub fn predict(&self, s: usize, n: usize) -> Result<F> {
        if s > n {
            return Err(LabError::param(format!(
                "success count {s} exceeds sample size {n}"
            )));
        }
        Ok((F::from_count(s) + self.a) / (F::from_count(n) + self.a + self.b))
    }

    /// The induced predictive rule at sample size `n`.
    pub fn rule(&self, n: usize) -> PredictiveRule<F> {
        PredictiveRule::from_fn(n, |s| {
            (F::from_count(s) + self.a) / (F::from_count(n) + self.a + self.b)
        })
        .expect("conjugate predictions are interior")
    }
}

/// Plug-in empirical-frequency forecast `s/n`; may be exactly 0 or 1.
/// Undefined at `n = 0`.
pub fn plugin_predict<F: Real>(s: usize, n: usize) -> Result<F> {
    if n == 0 {
        return Err(LabError::param(
            "plug-in prediction is undefined at n = 0".to_string(),
        ));
    }
    if s > n {
        return Err(LabError::param(format!(
            "success count {s} exceeds sample size {n}"
        )));
    }
    Ok(F::from_count(s) / F::from_count(n))
}

// ---------------------------------------------------------------------------
// Exact lattice diagnostics
// ---------------------------------------------------------------------------

/// Max over states `(s, n)` with `n <= n_max` of the one-step martingale
/// defect of the conjugate predictive under its own predictive law:
/// `|p * pred(s+1, n+1) + (1-p) * pred(s, n+1) - p|` with
/// `p = pred(s, n)`. Exact enumeration, no sampling; algebraically zero.
pub fn bayes_martingale_deviation<F: Real>(
    pred: &ConjugatePredictor<F>,
    n_max: usize,
) -> Result<F> {
    if n_max < 1 {
        return Err(LabError::param("n_max must be >= 1".to_string()));
    }
    let mut worst = F::zero();
    for n in 0..=n_max {
        for s in 0..=n {
            let p = pred.predict(s, n)?;
            let up = pred.predict(s + 1, n + 1)?;
            let down = pred.predict(s, n + 1)?;
            let expected = p * up + (F::one() - p) * down;
            worst = worst.max((expected - p).abs());
        }
    }
    Ok(worst)
}

/// Max over `1 <= n < n_max`, `0 <= s <= n` of
/// `|(s + s/n) / (n+1) - s/n|`: the plug-in rule's self-consistency
/// defect under its own predictive law. Algebraically zero.
pub fn plugin_self_martingale_deviation<F: Real>(n_max: usize) -> Result<F> {
    if n_max < 2 {
        return Err(LabError::param("n_max must be >= 2".to_string()));
    }
    let mut worst = F::zero();
    for n in 1..n_max {
        for s in 0..=n {
            let p: F = plugin_predict(s, n)?;
            let expected = (F::from_count(s) + p) / F::from_count(n + 1);
            worst = worst.max((expected - p).abs());
        }
    }
    Ok(worst)
}

/// Exact probability that the success count sits on the boundary:
/// `P(S_n in {0, n}) = theta^n + (1 - theta)^n`.
pub fn boundary_fraction_exact<F: Real>(n: usize, theta: F) -> Result<F> {
    if n < 1 {
        return Err(LabError::param("sample size must be >= 1".to_string()));
    }
    if !(theta > F::zero() && theta < F::one()) {
        return Err(LabError::domain(format!(
            "theta must lie in (0,1), got {theta}"
        )));
    }
    Ok(theta.powi(n as i32) + (F::one() - theta).powi(n as i32))
}

/// One row of the dominance certificate.
#[derive(Debug, Clone, Serialize)]
pub struct DominanceEntry {
    pub theta: f64,
    pub plugin_risk_infinite: bool,
    pub bayes_risk: f64,
    pub dominated: bool,
}

/// Plug-in vs Bayes dominance certificate over a theta grid.
#[derive(Debug, Clone, Serialize)]
pub struct DominanceReport {
    pub n: usize,
    pub all_dominated: bool,
    pub entries: Vec<DominanceEntry>,
}

/// Certify that at sample size `n` the plug-in rule's exact risk is
/// infinite at every grid theta (the boundary counts carry positive
/// probability) while the Beta(1/2,1/2) Bayes rule's risk is finite, so
/// the Bayes rule strictly dominates.
pub fn dominance_certificate(n: usize, theta_grid: &[f64]) -> Result<DominanceReport> {
    if theta_grid.is_empty() {
        return Err(LabError::Empty("theta grid"));
    }
    let plugin = PredictiveRule::<f64>::plugin(n)?;
    let bayes = ConjugatePredictor::<f64>::jeffreys().rule(n);
    let mut entries = Vec::with_capacity(theta_grid.len());
    let mut all = true;
    for &theta in theta_grid {
        let plugin_risk = exact_risk(&plugin, theta)?;
        let bayes_risk = exact_risk(&bayes, theta)?;
        let dominated = plugin_risk.is_infinite() && bayes_risk.is_finite();
        all &= dominated;
        entries.push(DominanceEntry {
            theta,
            plugin_risk_infinite: plugin_risk.is_infinite(),
            bayes_risk: bayes_risk.to_scalar(),
            dominated,
        });
    }
    Ok(DominanceReport {
        n,
        all_dominated: all,
        entries,
    })
}

// ---------------------------------------------------------------------------
// Average-log-loss experiment
// ---------------------------------------------------------------------------

/// Configuration of the average-log-loss experiment.
#[derive(Debug, Clone, Serialize)]
pub struct AvgLogLossConfig {
    pub mc: McConfig,
    /// Data-generating success probability.
    pub theta: f64,
    /// Sample sizes, one table row each.
    pub sample_sizes: Vec<usize>,
    /// Plug-in predictions are clamped to `[eps, 1-eps]` in the Monte-Carlo
    /// columns only; the exact plug-in risk column stays `+inf`.
    pub clamp_eps: f64,
}

impl AvgLogLossConfig {
    pub fn paper_defaults(seed: u64, reps: usize) -> Result<Self> {
        Ok(Self {
            mc: McConfig::new(seed, reps)?,
            theta: 0.3,
            sample_sizes: vec![5, 10, 25, 50, 100],
            clamp_eps: 1e-3,
        })
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(LabError::domain(format!(
                "theta must lie in (0,1), got {}",
                self.theta
            )));
        }
        if !(self.clamp_eps > 0.0 && self.clamp_eps < 0.5) {
            return Err(LabError::param(format!(
                "clamp eps must lie in (0, 0.5), got {}",
                self.clamp_eps
            )));
        }
        if self.sample_sizes.is_empty() {
            return Err(LabError::Empty("sample sizes"));
        }
        if self.sample_sizes.contains(&0) {
            return Err(LabError::param("sample sizes must be >= 1".to_string()));
        }
        Ok(())
    }
}

/// One row: Monte-Carlo averages next to the closed-form columns.
#[derive(Debug, Clone, Serialize)]
pub struct AvgLogLossRow {
    pub n: usize,
    pub bayes_risk_mc: f64,
    pub mle_risk_mc_clamped: f64,
    pub excess: f64,
    pub boundary_fraction_mc: f64,
    pub bayes_risk_exact: f64,
    /// Exact plug-in risk; always infinite, kept alongside the clamped
    /// Monte-Carlo column so the analytic truth stays visible.
    pub plugin_risk_exact: RiskValue<f64>,
    pub boundary_fraction_exact: f64,
}

/// Run the experiment: per sample size, the Monte-Carlo next-step log loss
/// of the Bayes and clamped plug-in forecasts (expected form `L(theta, p)`)
/// plus exact columns. Deterministic given the seed.
pub fn run_avg_log_loss(cfg: &AvgLogLossConfig) -> Result<Vec<AvgLogLossRow>> {
    cfg.validate()?;
    let theta = cfg.theta;
    let bayes = ConjugatePredictor::<f64>::jeffreys();
    let mut rows = Vec::with_capacity(cfg.sample_sizes.len());
    for (ni, &n) in cfg.sample_sizes.iter().enumerate() {
        // replication substreams are indexed per (row, replication)
        let row_cfg = McConfig {
            seed: cfg.mc.seed,
            reps: cfg.mc.reps,
        };
        let offset = (ni as u64) << 32;
        let draws = run_replications(row_cfg, |b, _| {
            let mut rng = crate::harness::derive_substream(cfg.mc.seed, offset | b as u64);
            let mut s = 0usize;
            for _ in 0..n {
                if rng.gen::<f64>() < theta {
                    s += 1;
                }
            }
            s
        });
        let mut bayes_losses = Vec::with_capacity(draws.len());
        let mut mle_losses = Vec::with_capacity(draws.len());
        let mut boundary = Vec::with_capacity(draws.len());
        for &s in &draws {
            let p_b = bayes.predict(s, n)?;
            bayes_losses.push(log_loss(theta, p_b)?.expect_finite("interior forecast"));
            let p_m: f64 = plugin_predict(s, n)?;
            let p_m = p_m.clamp(cfg.clamp_eps, 1.0 - cfg.clamp_eps);
            mle_losses.push(log_loss(theta, p_m)?.expect_finite("clamped forecast"));
            boundary.push(if s == 0 || s == n { 1.0 } else { 0.0 });
        }
        let b = draws.len() as f64;
        let bayes_mc = pairwise_sum(&bayes_losses) / b;
        let mle_mc = pairwise_sum(&mle_losses) / b;
        rows.push(AvgLogLossRow {
            n,
            bayes_risk_mc: bayes_mc,
            mle_risk_mc_clamped: mle_mc,
            excess: mle_mc - bayes_mc,
            boundary_fraction_mc: pairwise_sum(&boundary) / b,
            bayes_risk_exact: exact_risk(&bayes.rule(n), theta)?
                .expect_finite("Bayes risk is finite"),
            plugin_risk_exact: exact_risk(&PredictiveRule::<f64>::plugin(n)?, theta)?,
            boundary_fraction_exact: boundary_fraction_exact(n, theta)?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::risk::binary_entropy;
    use approx::assert_abs_diff_eq;

    #[test]
    fn conjugate_predictions() {
        let j = ConjugatePredictor::<f64>::jeffreys();
        assert_abs_diff_eq!(j.predict(0, 0).unwrap(), 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(j.predict(3, 10).unwrap(), 3.5 / 11.0, epsilon = 1e-15);
        let l = ConjugatePredictor::<f64>::laplace();
        assert_abs_diff_eq!(l.predict(10, 10).unwrap(), 11.0 / 12.0, epsilon = 1e-15);
        assert!(j.predict(11, 10).is_err());
        assert!(ConjugatePredictor::new(0.0, 1.0).is_err());
        assert!(ConjugatePredictor::new(1.0, -1.0).is_err());
    }

    #[test]
    fn conjugate_predictions_always_interior() {
        for &(a, b) in &[(0.5, 0.5), (1.0, 1.0), (0.1, 3.0), (7.0, 0.2)] {
            let pred = ConjugatePredictor::new(a, b).unwrap();
            for n in 0..=30usize {
                for s in 0..=n {
                    let p = pred.predict(s, n).unwrap();
                    assert!(p > 0.0 && p < 1.0);
                }
            }
        }
    }

    #[test]
    fn plugin_hits_boundary_exactly() {
        assert_eq!(plugin_predict::<f64>(0, 5).unwrap(), 0.0);
        assert_eq!(plugin_predict::<f64>(5, 10).unwrap(), 0.5);
        assert_eq!(plugin_predict::<f64>(10, 10).unwrap(), 1.0);
        assert!(plugin_predict::<f64>(0, 0).is_err());
        assert!(plugin_predict::<f64>(3, 2).is_err());
    }

    #[test]
    fn bayes_martingale_identity_on_lattice() {
        // single step
        let d = bayes_martingale_deviation(&ConjugatePredictor::<f64>::jeffreys(), 1).unwrap();
        assert!(d <= 1e-15, "single-step deviation {d}");
        // pseudo-count grid, depth 50
        for &a in &[0.2, 0.5, 1.0, 2.0, 5.0] {
            for &b in &[0.2, 0.5, 1.0, 2.0, 5.0] {
                let pred = ConjugatePredictor::new(a, b).unwrap();
                let d = bayes_martingale_deviation(&pred, 50).unwrap();
                assert!(d <= 1e-12, "deviation {d} at a={a} b={b}");
            }
        }
    }

    #[test]
    fn plugin_self_martingale_identity() {
        let d = plugin_self_martingale_deviation::<f64>(50).unwrap();
        assert!(d <= 1e-12, "deviation {d}");
        assert!(plugin_self_martingale_deviation::<f64>(1).is_err());
    }

    #[test]
    fn boundary_fraction_values() {
        assert_abs_diff_eq!(
            boundary_fraction_exact(5, 0.3f64).unwrap(),
            0.17050,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            boundary_fraction_exact(10, 0.3f64).unwrap(),
            0.028_253_429_8,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            boundary_fraction_exact(1, 0.42f64).unwrap(),
            1.0,
            epsilon = 1e-15
        );
        assert!(boundary_fraction_exact(0, 0.3f64).is_err());
    }

    #[test]
    fn dominance_certificate_examples() {
        let rep = dominance_certificate(5, &[0.3]).unwrap();
        assert!(rep.all_dominated);
        assert!(rep.entries[0].plugin_risk_infinite);
        assert_abs_diff_eq!(
            rep.entries[0].bayes_risk,
            0.692_103_392_420_905_8,
            epsilon = 1e-12
        );

        // n = 1, theta = 0.5: frozen from the independent 2-path oracle
        let rep = dominance_certificate(1, &[0.5]).unwrap();
        assert!(rep.all_dominated);
        assert_abs_diff_eq!(
            rep.entries[0].bayes_risk,
            0.836_988_216_785_835_8,
            epsilon = 1e-12
        );

        // n = 100, theta = 0.01: boundary probability 0.99^100 stays positive
        let rep = dominance_certificate(100, &[0.01]).unwrap();
        assert!(rep.all_dominated);
        assert_abs_diff_eq!(
            boundary_fraction_exact(100, 0.01f64).unwrap(),
            0.366_032_341_273_229_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn exact_bayes_risk_decreasing_with_entropy_floor() {
        let bayes = ConjugatePredictor::<f64>::jeffreys();
        let floor = binary_entropy(0.3).unwrap();
        let mut prev = f64::INFINITY;
        for &n in &[5usize, 10, 25, 50, 100] {
            let r = exact_risk(&bayes.rule(n), 0.3)
                .unwrap()
                .expect_finite("risk");
            assert!(r < prev, "risk not decreasing at n={n}");
            assert!(r > floor, "risk below entropy floor at n={n}");
            prev = r;
        }
    }

    #[test]
    fn avg_log_loss_experiment_small_run() {
        let cfg = AvgLogLossConfig {
            mc: McConfig::new(42, 2000).unwrap(),
            theta: 0.3,
            sample_sizes: vec![5, 10],
            clamp_eps: 1e-3,
        };
        let rows = run_avg_log_loss(&cfg).unwrap();
        assert_eq!(rows.len(), 2);
        let r5 = &rows[0];
        // MC within 5 sigma of exact (loss values bounded by clamp)
        assert!((r5.bayes_risk_mc - r5.bayes_risk_exact).abs() < 0.05);
        assert!((r5.boundary_fraction_mc - 0.17050).abs() < 0.03);
        assert!(r5.plugin_risk_exact.is_infinite());
        assert!(r5.excess > 0.0);
        // byte-level determinism
        let rows2 = run_avg_log_loss(&cfg).unwrap();
        assert_eq!(format!("{rows:?}"), format!("{rows2:?}"));
    }

    #[test]
    fn avg_log_loss_rejects_bad_config() {
        let mut cfg = AvgLogLossConfig::paper_defaults(1, 10).unwrap();
        cfg.theta = 1.2;
        assert!(run_avg_log_loss(&cfg).is_err());
        let mut cfg = AvgLogLossConfig::paper_defaults(1, 10).unwrap();
        cfg.clamp_eps = 0.0;
        assert!(run_avg_log_loss(&cfg).is_err());
        let mut cfg = AvgLogLossConfig::paper_defaults(1, 10).unwrap();
        cfg.sample_sizes = vec![];
        assert!(run_avg_log_loss(&cfg).is_err());
    }
}
