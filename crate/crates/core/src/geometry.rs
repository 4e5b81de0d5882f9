//! Exact risk vectors for Bernoulli predictive rules over a finite
//! parameter space, lower-boundary tracing via two-point priors,
//! supporting-hyperplane verification, and dominance certificates.
//!
//! Everything here is closed-form: risks are exact binomial expectations,
//! and Bayes acts under log loss are posterior means, so the boundary
//! trace carries no Monte-Carlo error.

use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::numeric::binomial_weights;
use crate::risk::{log_loss, FiniteParamSpace, Prior, RiskValue, RiskVector};
use crate::scalar::Real;

// ---------------------------------------------------------------------------
// PredictiveRule
// ---------------------------------------------------------------------------

/// A deterministic forecast rule on the Bernoulli sufficient statistic:
/// entry `s` is the predicted success probability after observing `s`
/// successes in `n` trials.
#[derive(Debug, Clone, PartialEq)]
pub struct PredictiveRule<F> {
    n: usize,
    probs: Vec<F>,
}

impl<F: Real> PredictiveRule<F> {
    /// Build from the full table of `n + 1` predictions, each in `[0, 1]`.
    pub fn new(probs: Vec<F>) -> Result<Self> {
        if probs.is_empty() {
            return Err(LabError::Empty("predictive rule"));
        }
        for &p in &probs {
            if !(p >= F::zero() && p <= F::one()) {
                return Err(LabError::domain(format!(
                    "predicted probability must lie in [0,1], got {p}"
                )));
            }
        }
        Ok(Self {
            n: probs.len() - 1,
            probs,
        })
    }

    /// Rule defined by a function of the success count.
    pub fn from_fn(n: usize, f: impl Fn(usize) -> F) -> Result<Self> {
        Self::new((0..=n).map(f).collect())
    }

    /// The constant rule predicting `p` regardless of the data.
    pub fn constant(n: usize, p: F) -> Result<Self> {
        Self::new(vec![p; n + 1])
    }

    /// The plug-in empirical-frequency rule `s/n`; undefined at `n = 0`.
    pub fn plugin(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(LabError::param(
                "plug-in rule is undefined at n = 0".to_string(),
            ));
        }
        Self::from_fn(n, |s| F::from_count(s) / F::from_count(n))
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[F] {
        &self.probs
    }

    pub fn predict(&self, s: usize) -> F {
        self.probs[s]
    }

    /// Whether every prediction is strictly inside `(0, 1)`.
    pub fn is_interior(&self) -> bool {
        self.probs.iter().all(|&p| p > F::zero() && p < F::one())
    }
}

// ---------------------------------------------------------------------------
// Exact risks
// ---------------------------------------------------------------------------

/// Exact next-step log-loss risk of `rule` at `theta`: the binomial
/// expectation over the success count of the per-count loss.
///
/// Infinite exactly when some count (every count has positive binomial
/// weight for interior `theta`) predicts 0 or 1.
pub fn exact_risk<F: Real>(rule: &PredictiveRule<F>, theta: F) -> Result<RiskValue<F>> {
    let weights = binomial_weights(rule.n, theta);
    let mut acc = F::zero();
    for (s, &w) in weights.iter().enumerate() {
        match log_loss(theta, rule.probs[s])? {
            RiskValue::Finite(l) => acc += w * l,
            RiskValue::Infinite => return Ok(RiskValue::Infinite),
        }
    }
    RiskValue::finite(acc)
}

/// Risk vector of `rule` over a finite parameter space.
pub fn risk_vector<F: Real>(
    rule: &PredictiveRule<F>,
    space: &FiniteParamSpace<F>,
) -> Result<RiskVector<F>> {
    let values = space
        .thetas()
        .iter()
        .map(|&t| exact_risk(rule, t))
        .collect::<Result<Vec<_>>>()?;
    RiskVector::new(values)
}

/// Exact risk of a lambda-mixture of two rules, computed as the mixture
/// of expectations (the randomized-rule risk). This is the second route
/// of the mixture-convexity identity; the first is the lambda-combination
/// of the two exact risks.
pub fn mixture_risk<F: Real>(
    rule1: &PredictiveRule<F>,
    rule2: &PredictiveRule<F>,
    lambda: F,
    theta: F,
) -> Result<RiskValue<F>> {
    if rule1.n != rule2.n {
        return Err(LabError::LengthMismatch {
            expected: rule1.n + 1,
            got: rule2.n + 1,
        });
    }
    if !(lambda >= F::zero() && lambda <= F::one()) {
        return Err(LabError::domain(format!(
            "mixture weight must lie in [0,1], got {lambda}"
        )));
    }
    let weights = binomial_weights(rule1.n, theta);
    let mut acc = F::zero();
    for (s, &w) in weights.iter().enumerate() {
        let l1 = match log_loss(theta, rule1.probs[s])? {
            RiskValue::Finite(l) => l,
            RiskValue::Infinite => return Ok(RiskValue::Infinite),
        };
        let l2 = match log_loss(theta, rule2.probs[s])? {
            RiskValue::Finite(l) => l,
            RiskValue::Infinite => return Ok(RiskValue::Infinite),
        };
        acc += w * (lambda * l1 + (F::one() - lambda) * l2);
    }
    RiskValue::finite(acc)
}

// ---------------------------------------------------------------------------
// Bayes rules and the lower boundary
// ---------------------------------------------------------------------------

/// The Bayes rule for a prior over the finite space under log loss: per
/// success count, the posterior mean
/// `p*(s) = sum_j pi_j P_j(s) theta_j / sum_j pi_j P_j(s)`.
///
/// A point-mass prior yields the constant rule at its atom; predictions
/// are convex combinations of interior thetas, hence interior.
pub fn bayes_rule_for_prior<F: Real>(
    prior: &Prior<F>,
    space: &FiniteParamSpace<F>,
    n: usize,
) -> Result<PredictiveRule<F>> {
    if prior.len() != space.len() {
        return Err(LabError::LengthMismatch {
            expected: space.len(),
            got: prior.len(),
        });
    }
    let tables: Vec<Vec<F>> = space
        .thetas()
        .iter()
        .map(|&t| binomial_weights(n, t))
        .collect();
    let mut probs = Vec::with_capacity(n + 1);
    for s in 0..=n {
        let mut num = F::zero();
        let mut den = F::zero();
        for ((&theta, &weight), table) in space.thetas().iter().zip(prior.weights()).zip(&tables) {
            let w = weight * table[s];
            num += w * theta;
            den += w;
        }
        probs.push(num / den);
    }
    PredictiveRule::new(probs)
}

/// A swept lower boundary: Bayes risk vectors indexed by the prior grid.
#[derive(Debug, Clone)]
pub struct BoundaryTrace<F> {
    space: FiniteParamSpace<F>,
    n: usize,
    points: Vec<(Prior<F>, RiskVector<F>)>,
}

impl<F: Real> BoundaryTrace<F> {
    pub fn points(&self) -> &[(Prior<F>, RiskVector<F>)] {
        &self.points
    }

    pub fn sample_size(&self) -> usize {
        self.n
    }

    pub fn space(&self) -> &FiniteParamSpace<F> {
        &self.space
    }
}

/// Trace the lower boundary of the two-point risk set by sweeping the
/// prior weight on the first parameter over an even grid and recording
/// each Bayes rule's exact risk vector.
///
/// Restricted to `|Theta| = 2`; higher-dimensional tracing is out of
/// scope. Risk coordinates move monotonically in opposite directions
/// along the sweep.
pub fn trace_lower_boundary<F: Real>(
    space: &FiniteParamSpace<F>,
    n: usize,
    grid_size: usize,
) -> Result<BoundaryTrace<F>> {
    if space.len() != 2 {
        return Err(LabError::param(format!(
            "boundary tracing requires exactly two parameters, got {}",
            space.len()
        )));
    }
    if grid_size < 3 {
        return Err(LabError::param(format!(
            "grid size must be >= 3, got {grid_size}"
        )));
    }
    let points = (0..grid_size)
        .into_par_iter()
        .map(|i| {
            let w1 = F::from_count(i) / F::from_count(grid_size - 1);
            let prior = Prior::two_point(w1)?;
            let rule = bayes_rule_for_prior(&prior, space, n)?;
            let rv = risk_vector(&rule, space)?;
            Ok((prior, rv))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BoundaryTrace {
        space: space.clone(),
        n,
        points,
    })
}

/// Result of a supporting-hyperplane test at one prior.
#[derive(Debug, Clone)]
pub struct HyperplaneReport<F> {
    /// Prior-weighted risk of the Bayes rule for that prior.
    pub bayes_weighted: F,
    /// Max over candidates of (Bayes weighted risk - candidate weighted
    /// risk); nonpositive up to roundoff when the hyperplane supports.
    /// `-inf` when every candidate has infinite weighted risk.
    pub max_violation: F,
    pub candidates_checked: usize,
}

/// Verify that the Bayes rule for `prior` minimizes prior-weighted risk
/// against each candidate, treating infinite candidate risk as
/// always-greater. Returns the worst (largest) violation observed.
pub fn check_hyperplane_support<F: Real>(
    prior: &Prior<F>,
    space: &FiniteParamSpace<F>,
    n: usize,
    candidates: &[PredictiveRule<F>],
) -> Result<HyperplaneReport<F>> {
    if candidates.is_empty() {
        return Err(LabError::Empty("candidate rules"));
    }
    let bayes = bayes_rule_for_prior(prior, space, n)?;
    let bayes_weighted = risk_vector(&bayes, space)?
        .weighted(prior)?
        .expect_finite("Bayes weighted risk");
    let mut max_violation = F::neg_infinity();
    for cand in candidates {
        if cand.sample_size() != n {
            return Err(LabError::LengthMismatch {
                expected: n + 1,
                got: cand.sample_size() + 1,
            });
        }
        let violation = match risk_vector(cand, space)?.weighted(prior)? {
            RiskValue::Finite(w) => bayes_weighted - w,
            RiskValue::Infinite => F::neg_infinity(),
        };
        max_violation = max_violation.max(violation);
    }
    Ok(HyperplaneReport {
        bayes_weighted,
        max_violation,
        candidates_checked: candidates.len(),
    })
}

/// Minimum over traced priors of the rule's weighted-risk excess above
/// the traced Bayes value. Zero iff the rule attains some traced Bayes
/// point; infinite when the rule's weighted risk is infinite at every
/// traced prior.
pub fn boundary_gap<F: Real>(
    rule: &PredictiveRule<F>,
    trace: &BoundaryTrace<F>,
) -> Result<RiskValue<F>> {
    if rule.sample_size() != trace.n {
        return Err(LabError::LengthMismatch {
            expected: trace.n + 1,
            got: rule.sample_size() + 1,
        });
    }
    let rv = risk_vector(rule, &trace.space)?;
    let mut best = RiskValue::<F>::infinite();
    for (prior, bayes_rv) in &trace.points {
        let bayes_w = bayes_rv.weighted(prior)?.expect_finite("traced Bayes risk");
        let gap = match rv.weighted(prior)? {
            RiskValue::Finite(w) => RiskValue::finite((w - bayes_w).max(F::zero()))?,
            RiskValue::Infinite => RiskValue::Infinite,
        };
        if gap < best {
            best = gap;
        }
    }
    Ok(best)
}

/// A uniformly random rule (each prediction i.i.d. uniform on `[0, 1]`);
/// candidate fodder for hyperplane and dominance scans.
pub fn random_rule<R: rand::Rng>(n: usize, rng: &mut R) -> PredictiveRule<f64> {
    PredictiveRule::new((0..=n).map(|_| rng.gen::<f64>()).collect())
        .expect("uniform draws are valid probabilities")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::derive_substream;
    use crate::risk::binary_entropy;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn space_37() -> FiniteParamSpace<f64> {
        FiniteParamSpace::bernoulli(vec![0.3, 0.7]).unwrap()
    }

    fn jeffreys_rule(n: usize) -> PredictiveRule<f64> {
        PredictiveRule::from_fn(n, |s| (s as f64 + 0.5) / (n as f64 + 1.0)).unwrap()
    }

    /// Independent oracle: exact risk by enumerating all 2^n outcome
    /// sequences, no binomial coefficients involved.
    fn exact_risk_by_enumeration(rule: &PredictiveRule<f64>, theta: f64) -> f64 {
        let n = rule.sample_size();
        let mut total = 0.0;
        for bits in 0u32..(1 << n) {
            let s = bits.count_ones() as usize;
            let w = theta.powi(s as i32) * (1.0 - theta).powi((n - s) as i32);
            let p = rule.predict(s);
            if p <= 0.0 || p >= 1.0 {
                return f64::INFINITY;
            }
            total += w * (-(theta * p.ln()) - (1.0 - theta) * (1.0 - p).ln());
        }
        total
    }

    #[test]
    fn exact_risk_matches_enumeration_oracle() {
        for n in 1..=8 {
            let rule = jeffreys_rule(n);
            for &theta in &[0.1, 0.3, 0.5, 0.9] {
                let direct = exact_risk(&rule, theta).unwrap().expect_finite("risk");
                let oracle = exact_risk_by_enumeration(&rule, theta);
                assert_abs_diff_eq!(direct, oracle, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn bayes_rule_risk_frozen_value() {
        // n = 5, theta = 0.3: frozen from the independent 2^5 enumeration.
        let r = exact_risk(&jeffreys_rule(5), 0.3)
            .unwrap()
            .expect_finite("risk");
        assert_abs_diff_eq!(r, 0.692_103_392_420_905_8, epsilon = 1e-12);
    }

    #[test]
    fn plugin_risk_is_infinite() {
        let plugin = PredictiveRule::<f64>::plugin(5).unwrap();
        assert!(exact_risk(&plugin, 0.3).unwrap().is_infinite());
        let rv = risk_vector(&plugin, &space_37()).unwrap();
        assert!(rv.values().iter().all(RiskValue::is_infinite));
    }

    #[test]
    fn constant_oracle_rule_attains_entropy() {
        for &theta in &[0.2, 0.5, 0.77] {
            let rule = PredictiveRule::constant(7, theta).unwrap();
            let r = exact_risk(&rule, theta).unwrap().expect_finite("risk");
            assert_abs_diff_eq!(r, binary_entropy(theta).unwrap(), epsilon = 1e-13);
        }
    }

    #[test]
    fn interior_rules_have_finite_risk_vectors() {
        let mut rng = derive_substream(11, 0);
        for _ in 0..50 {
            let mut rule = random_rule(6, &mut rng);
            // push strictly interior
            let probs: Vec<f64> = rule.probs().iter().map(|p| 0.5 * p + 0.25).collect();
            rule = PredictiveRule::new(probs).unwrap();
            assert!(risk_vector(&rule, &space_37()).unwrap().all_finite());
        }
    }

    #[test]
    fn bayes_rule_posterior_means() {
        let space = space_37();
        // symmetric prior, n = 0: prior mean
        let p = bayes_rule_for_prior(&Prior::two_point(0.5).unwrap(), &space, 0).unwrap();
        assert_abs_diff_eq!(p.predict(0), 0.5, epsilon = 1e-15);
        // one observation: hand-computed posterior means
        let p = bayes_rule_for_prior(&Prior::two_point(0.5).unwrap(), &space, 1).unwrap();
        assert_abs_diff_eq!(p.predict(1), 0.58, epsilon = 1e-15);
        assert_abs_diff_eq!(p.predict(0), 0.42, epsilon = 1e-15);
        // point prior: constant rule at its atom
        let p = bayes_rule_for_prior(&Prior::new(vec![1.0, 0.0]).unwrap(), &space, 4).unwrap();
        for s in 0..=4 {
            assert_abs_diff_eq!(p.predict(s), 0.3, epsilon = 1e-15);
        }
        assert!(p.is_interior());
    }

    #[test]
    fn trace_endpoints_are_constant_rules() {
        let space = space_37();
        let trace = trace_lower_boundary(&space, 6, 41).unwrap();
        let (first_prior, first_rv) = &trace.points()[0];
        // grid starts at weight 0 on theta1, i.e. point mass on theta2
        assert_abs_diff_eq!(first_prior.weights()[0], 0.0, epsilon = 1e-15);
        let h7 = binary_entropy(0.7).unwrap();
        assert_abs_diff_eq!(first_rv.get(1).expect_finite("risk"), h7, epsilon = 1e-13);
        let (last_prior, last_rv) = trace.points().last().unwrap();
        assert_abs_diff_eq!(last_prior.weights()[0], 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            last_rv.get(0).expect_finite("risk"),
            binary_entropy(0.3).unwrap(),
            epsilon = 1e-13
        );
        // frozen cross-risk of the constant-0.3 rule at theta = 0.7
        assert_abs_diff_eq!(
            last_rv.get(1).expect_finite("risk"),
            0.949_783_446_209_775,
            epsilon = 1e-12
        );
    }

    #[test]
    fn trace_is_monotone_and_symmetric_at_midpoint() {
        let space = space_37();
        let trace = trace_lower_boundary(&space, 10, 101).unwrap();
        let pts = trace.points();
        for w in pts.windows(2) {
            let (a, b) = (&w[0].1, &w[1].1);
            // increasing weight on theta1 reduces risk at theta1, raises it at theta2
            assert!(b.get(0).expect_finite("r1") <= a.get(0).expect_finite("r1") + 1e-12);
            assert!(b.get(1).expect_finite("r2") + 1e-12 >= a.get(1).expect_finite("r2"));
        }
        let mid = &pts[50].1;
        assert_abs_diff_eq!(
            mid.get(0).expect_finite("r"),
            mid.get(1).expect_finite("r"),
            epsilon = 1e-12
        );
        // every traced point undominated by every other traced point
        for (i, (_, a)) in pts.iter().enumerate() {
            for (j, (_, b)) in pts.iter().enumerate() {
                if i != j {
                    assert!(!a.dominates(b).unwrap(), "trace point {i} dominates {j}");
                }
            }
        }
    }

    #[test]
    fn symmetric_rule_has_equal_coordinates() {
        // Theta symmetric about 1/2 and rule symmetric under s -> n-s,
        // p -> 1-p gives a symmetric risk pair.
        let rule = jeffreys_rule(10);
        let rv = risk_vector(&rule, &space_37()).unwrap();
        assert_abs_diff_eq!(
            rv.get(0).expect_finite("r"),
            rv.get(1).expect_finite("r"),
            epsilon = 1e-12
        );
        // Laplace rule (s+1)/(n+2) at n = 10: finite symmetric pair,
        // frozen from the independent binomial-sum oracle
        let laplace = PredictiveRule::from_fn(10, |s| (s as f64 + 1.0) / 12.0).unwrap();
        let rv = risk_vector(&laplace, &space_37()).unwrap();
        assert_abs_diff_eq!(
            rv.get(0).expect_finite("r"),
            0.648_702_244_385_550_4,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            rv.get(0).expect_finite("r"),
            rv.get(1).expect_finite("r"),
            epsilon = 1e-12
        );
    }

    #[test]
    fn hyperplane_support_examples() {
        let space = space_37();
        let n = 10;
        let prior = Prior::two_point(0.35).unwrap();
        let bayes = bayes_rule_for_prior(&prior, &space, n).unwrap();
        // the Bayes rule itself: zero violation
        let rep = check_hyperplane_support(&prior, &space, n, &[bayes]).unwrap();
        assert!(rep.max_violation.abs() <= 1e-14);
        // random candidates never undercut the hyperplane
        let mut rng = derive_substream(3, 1);
        let cands: Vec<_> = (0..100).map(|_| random_rule(n, &mut rng)).collect();
        let rep = check_hyperplane_support(&prior, &space, n, &cands).unwrap();
        assert!(
            rep.max_violation <= 1e-10,
            "violation {}",
            rep.max_violation
        );
        // plug-in candidate: infinite slack
        let plugin = PredictiveRule::plugin(n).unwrap();
        let rep = check_hyperplane_support(&prior, &space, n, &[plugin]).unwrap();
        assert_eq!(rep.max_violation, f64::NEG_INFINITY);
        assert!(check_hyperplane_support(&prior, &space, n, &[]).is_err());
    }

    #[test]
    fn traced_bayes_rules_undominated_by_random_rules() {
        let space = space_37();
        let n = 8;
        let trace = trace_lower_boundary(&space, n, 21).unwrap();
        let mut rng = derive_substream(4, 2);
        let cands: Vec<_> = (0..1000).map(|_| random_rule(n, &mut rng)).collect();
        for (_, bayes_rv) in trace.points() {
            for cand in &cands {
                let cand_rv = risk_vector(cand, &space).unwrap();
                assert!(!cand_rv.dominates(bayes_rv).unwrap());
            }
        }
    }

    #[test]
    fn boundary_gap_examples() {
        let space = space_37();
        let n = 10;
        let trace = trace_lower_boundary(&space, n, 101).unwrap();
        // a traced Bayes rule: gap 0
        let prior = Prior::two_point(0.27).unwrap(); // on the 101-grid
        let bayes = bayes_rule_for_prior(&prior, &space, n).unwrap();
        let gap = boundary_gap(&bayes, &trace).unwrap().expect_finite("gap");
        assert!(gap.abs() <= 1e-12, "gap {gap}");
        // plug-in: infinite gap
        let plugin = PredictiveRule::plugin(n).unwrap();
        assert!(boundary_gap(&plugin, &trace).unwrap().is_infinite());
        // Jeffreys predictive: small positive gap, reported not asserted
        // against the fig-level claim (see README); sanity-band only.
        let trace_fine = trace_lower_boundary(&space, n, 1001).unwrap();
        let gap = boundary_gap(&jeffreys_rule(n), &trace_fine)
            .unwrap()
            .expect_finite("gap");
        assert!(gap > 0.0 && gap < 0.05, "jeffreys gap {gap}");
    }

    #[test]
    fn hyperplane_normal_matches_boundary_slope() {
        // Shadow-price consistency: along the trace, the finite-difference
        // slope dR2/dR1 approximates -pi1/pi2 at interior grid points.
        let space = space_37();
        let trace = trace_lower_boundary(&space, 10, 2001).unwrap();
        let pts = trace.points();
        for i in (100..1900).step_by(200) {
            let (prior, _) = &pts[i];
            let (r_prev, r_next) = (&pts[i - 1].1, &pts[i + 1].1);
            let d1 = r_next.get(0).expect_finite("r1") - r_prev.get(0).expect_finite("r1");
            let d2 = r_next.get(1).expect_finite("r2") - r_prev.get(1).expect_finite("r2");
            let slope = d2 / d1;
            let ratio = -prior.weights()[0] / prior.weights()[1];
            assert!(
                (slope - ratio).abs() <= 0.02 * ratio.abs(),
                "slope {slope} vs -pi1/pi2 {ratio} at grid {i}"
            );
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let space = space_37();
        assert!(trace_lower_boundary(&space, 5, 2).is_err());
        let three = FiniteParamSpace::bernoulli(vec![0.2, 0.5, 0.8]).unwrap();
        assert!(trace_lower_boundary(&three, 5, 11).is_err());
        assert!(PredictiveRule::new(vec![0.5, 1.5]).is_err());
        assert!(PredictiveRule::<f64>::plugin(0).is_err());
        assert!(PredictiveRule::<f64>::new(vec![]).is_err());
    }

    #[test]
    fn generic_kernel_works_in_f32() {
        let space = FiniteParamSpace::bernoulli(vec![0.3f32, 0.7]).unwrap();
        let rule = PredictiveRule::from_fn(5, |s| (s as f32 + 0.5) / 6.0).unwrap();
        let rv = risk_vector(&rule, &space).unwrap();
        assert!((rv.get(0).expect_finite("r") - 0.692_103_4).abs() < 1e-4);
    }

    proptest! {
        // Mixture convexity: the randomized-mixture risk equals the convex
        // combination of risks, as an exact identity on finite-risk rules.
        #[test]
        fn mixture_risk_is_convex_combination(
            seed in 0u64..1000,
            lambda in 0.0f64..=1.0,
            theta in 0.05f64..0.95,
        ) {
            let mut rng = derive_substream(seed, 77);
            let interior = |rng: &mut rand_chacha::ChaCha8Rng| {
                let r = random_rule(6, rng);
                PredictiveRule::new(r.probs().iter().map(|p| 0.98 * p + 0.01).collect()).unwrap()
            };
            let r1 = interior(&mut rng);
            let r2 = interior(&mut rng);
            let mixed = mixture_risk(&r1, &r2, lambda, theta).unwrap().expect_finite("mix");
            let a = exact_risk(&r1, theta).unwrap().expect_finite("r1");
            let b = exact_risk(&r2, theta).unwrap().expect_finite("r2");
            let combo = lambda * a + (1.0 - lambda) * b;
            prop_assert!((mixed - combo).abs() <= 1e-12 * (1.0 + combo.abs()));
        }
    }
}
