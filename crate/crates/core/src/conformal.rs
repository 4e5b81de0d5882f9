//! Split-conformal calibration with the naive absolute score, the
//! covariate-shift experiment, and the binary full-conformal set with
//! exact small-sample coverage enumeration.
//!
//! Only marginal coverage is targeted. Exact conditional coverage at
//! every covariate value is unattainable for continuous designs without
//! prediction sets of infinite expected length, so no conditional
//! guarantee is attempted or tested here; the shift experiment shows
//! precisely how the marginal guarantee bends under a design change.

use rand::Rng;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::harness::{pairwise_sum, run_replications, McConfig};
use crate::numeric::{beta25_inverse_cdf, binomial_weights, normal_from_uniforms};
use crate::scalar::Real;

// ---------------------------------------------------------------------------
// Split-conformal calibration
// ---------------------------------------------------------------------------

/// Split-conformal calibration summary: the finite-sample score quantile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConformalCalibration<F> {
    /// The `ceil((n+1)(1-alpha))`-th smallest calibration score, or
    /// `F::infinity()` when that index exceeds `n` (the full-space set).
    pub quantile: F,
    pub n_cal: usize,
    pub alpha: f64,
}

/// Calibrate on held-out nonconformity scores at level `alpha`:
/// the order statistic at 1-based index `ceil((n+1)(1-alpha))`.
pub fn calibrate<F: Real>(scores: &[F], alpha: f64) -> Result<ConformalCalibration<F>> {
    if scores.is_empty() {
        return Err(LabError::Empty("calibration scores"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(LabError::domain(format!(
            "level must lie in (0,1), got {alpha}"
        )));
    }
    for &s in scores {
        if s.is_nan() || s < F::zero() {
            return Err(LabError::domain(format!(
                "scores must be nonnegative reals, got {s}"
            )));
        }
    }
    let n = scores.len();
    let k = ((n as f64 + 1.0) * (1.0 - alpha)).ceil() as usize;
    let quantile = if k > n {
        F::infinity()
    } else {
        let mut sorted = scores.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN scores"));
        sorted[k - 1]
    };
    Ok(ConformalCalibration {
        quantile,
        n_cal: n,
        alpha,
    })
}

/// Symmetric prediction interval for the absolute score `|y|`:
/// `{y : |y| <= q} = [-q, q]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SymmetricInterval<F> {
    pub half_width: F,
}

impl<F: Real> SymmetricInterval<F> {
    pub fn contains(&self, y: F) -> bool {
        y.abs() <= self.half_width
    }
}

pub fn predict_interval<F: Real>(calib: &ConformalCalibration<F>) -> SymmetricInterval<F> {
    SymmetricInterval {
        half_width: calib.quantile,
    }
}

// ---------------------------------------------------------------------------
// Covariate-shift experiment
// ---------------------------------------------------------------------------

/// Covariate design: the distribution of X on [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Design {
    /// Uniform[0, 1].
    Uniform,
    /// Beta(2, 5), sampled by inverse CDF for cross-platform determinism.
    Beta25,
}

impl Design {
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        let u: f64 = rng.gen();
        match self {
            Design::Uniform => u,
            Design::Beta25 => beta25_inverse_cdf(u),
        }
    }
}

/// Calibration/test design pair with heteroscedastic noise
/// `Y | X = x ~ N(0, (1 + x)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ShiftScenario {
    pub cal_design: Design,
    pub test_design: Design,
}

impl ShiftScenario {
    /// Scenario A: Uniform calibration, Uniform test.
    pub fn matched_uniform() -> Self {
        Self {
            cal_design: Design::Uniform,
            test_design: Design::Uniform,
        }
    }

    /// Scenario B: Uniform calibration, Beta(2,5) test (covariate shift).
    pub fn shifted() -> Self {
        Self {
            cal_design: Design::Uniform,
            test_design: Design::Beta25,
        }
    }

    /// Scenario C: Beta(2,5) calibration, Beta(2,5) test.
    pub fn matched_beta() -> Self {
        Self {
            cal_design: Design::Beta25,
            test_design: Design::Beta25,
        }
    }

    pub fn label(&self) -> &'static str {
        match (self.cal_design, self.test_design) {
            (Design::Uniform, Design::Uniform) => "A",
            (Design::Uniform, Design::Beta25) => "B",
            (Design::Beta25, Design::Beta25) => "C",
            (Design::Beta25, Design::Uniform) => "beta_to_unif",
        }
    }

    fn draw_y<R: Rng>(x: f64, rng: &mut R) -> f64 {
        let u1: f64 = rng.gen();
        let u2: f64 = rng.gen();
        (1.0 + x) * normal_from_uniforms(u1, u2)
    }
}

/// Configuration of the coverage-under-shift experiment.
#[derive(Debug, Clone, Serialize)]
pub struct CoverageShiftConfig {
    pub mc: McConfig,
    pub n_cal: usize,
    pub n_test: usize,
    pub alpha: f64,
}

impl CoverageShiftConfig {
    pub fn paper_defaults(seed: u64, reps: usize) -> Result<Self> {
        Ok(Self {
            mc: McConfig::new(seed, reps)?,
            n_cal: 500,
            n_test: 2000,
            alpha: 0.1,
        })
    }

    fn validate(&self) -> Result<()> {
        if self.n_cal == 0 || self.n_test == 0 {
            return Err(LabError::param(
                "calibration and test sizes must be >= 1".to_string(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(LabError::domain(format!(
                "alpha must lie in (0,1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Averages over replications of the split-conformal pipeline.
#[derive(Debug, Clone, Serialize)]
pub struct CoverageShiftReport {
    pub scenario: String,
    pub avg_quantile: f64,
    pub coverage: f64,
    pub avg_half_width: f64,
    pub reps: usize,
    pub seed: u64,
}

/// Run one scenario: per replication, calibrate `|y|` scores on `n_cal`
/// points from the calibration design, then record the empirical marginal
/// coverage over `n_test` points from the test design.
pub fn run_coverage_shift(
    scenario: ShiftScenario,
    cfg: &CoverageShiftConfig,
) -> Result<CoverageShiftReport> {
    cfg.validate()?;
    let rows = run_replications(cfg.mc, |_, rng| {
        let scores: Vec<f64> = (0..cfg.n_cal)
            .map(|_| {
                let x = scenario.cal_design.sample(rng);
                ShiftScenario::draw_y(x, rng).abs()
            })
            .collect();
        let calib = calibrate(&scores, cfg.alpha).expect("validated scores");
        let interval = predict_interval(&calib);
        let mut covered = 0usize;
        for _ in 0..cfg.n_test {
            let x = scenario.test_design.sample(rng);
            let y = ShiftScenario::draw_y(x, rng);
            if interval.contains(y) {
                covered += 1;
            }
        }
        (calib.quantile, covered as f64 / cfg.n_test as f64)
    });
    let b = rows.len() as f64;
    let quantiles: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let coverages: Vec<f64> = rows.iter().map(|r| r.1).collect();
    let avg_q = pairwise_sum(&quantiles) / b;
    Ok(CoverageShiftReport {
        scenario: scenario.label().to_string(),
        avg_quantile: avg_q,
        coverage: pairwise_sum(&coverages) / b,
        avg_half_width: avg_q,
        reps: cfg.mc.reps,
        seed: cfg.mc.seed,
    })
}

// ---------------------------------------------------------------------------
// Binary full-conformal set
// ---------------------------------------------------------------------------

/// The binary conformal set for a history with `s` successes in `n`
/// trials, plus the thresholds used per candidate label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BinaryConformalSet {
    pub contains_zero: bool,
    pub contains_one: bool,
    /// Augmented-quantile threshold used for candidate 0 and 1.
    pub thresholds: [f64; 2],
}

impl BinaryConformalSet {
    pub fn contains(&self, y: bool) -> bool {
        if y {
            self.contains_one
        } else {
            self.contains_zero
        }
    }

    pub fn size(&self) -> usize {
        usize::from(self.contains_zero) + usize::from(self.contains_one)
    }
}

/// Full-conformal set over labels `{0, 1}` with the centered score
/// `|y - mean|`: for each candidate, augment the sample with it, score
/// every point against the augmented mean, and keep the candidate iff its
/// score is within the `ceil((n+1)(1-alpha))`-th smallest augmented
/// score. Ties include the label.
pub fn binary_conformal_set(s: usize, n: usize, alpha: f64) -> Result<BinaryConformalSet> {
    if n < 1 {
        return Err(LabError::param("sample size must be >= 1".to_string()));
    }
    if s > n {
        return Err(LabError::param(format!(
            "success count {s} exceeds sample size {n}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(LabError::domain(format!(
            "level must lie in (0,1), got {alpha}"
        )));
    }
    let m = n + 1; // augmented size
    let k = ((m as f64) * (1.0 - alpha)).ceil() as usize;
    let mut contains = [false; 2];
    let mut thresholds = [0.0f64; 2];
    for (idx, y) in [0usize, 1usize].into_iter().enumerate() {
        let mean = (s + y) as f64 / m as f64;
        // scores: n - s observed zeros at |0 - mean|, s observed ones at
        // |1 - mean|, the candidate at |y - mean| (bit-identical to one
        // of the observed expressions, so ties are exact)
        let zero_score = mean;
        let one_score = 1.0 - mean;
        let cand_score = (y as f64 - mean).abs();
        let mut scores = vec![zero_score; n - s];
        scores.extend_from_slice(&vec![one_score; s]);
        scores.push(cand_score);
        scores.sort_by(|a, b| a.partial_cmp(b).expect("finite scores"));
        let q = scores[k - 1]; // k <= m since alpha > 0
        thresholds[idx] = q;
        contains[idx] = cand_score <= q;
    }
    Ok(BinaryConformalSet {
        contains_zero: contains[0],
        contains_one: contains[1],
        thresholds,
    })
}

/// Exact marginal coverage of the binary conformal set under i.i.d.
/// Bernoulli(theta), by enumeration over the sufficient statistic and the
/// next outcome. Restricted to `n <= 20`.
pub fn exact_binary_coverage(n: usize, theta: f64, alpha: f64) -> Result<f64> {
    if n > 20 {
        return Err(LabError::param(format!(
            "exact enumeration is limited to n <= 20, got {n}"
        )));
    }
    if !(theta > 0.0 && theta < 1.0) {
        return Err(LabError::domain(format!(
            "theta must lie in (0,1), got {theta}"
        )));
    }
    let weights = binomial_weights(n, theta);
    let mut coverage = 0.0;
    for (s, &w) in weights.iter().enumerate() {
        let set = binary_conformal_set(s, n, alpha)?;
        let mut mass = 0.0;
        if set.contains_one {
            mass += theta;
        }
        if set.contains_zero {
            mass += 1.0 - theta;
        }
        coverage += w * mass;
    }
    Ok(coverage)
}
