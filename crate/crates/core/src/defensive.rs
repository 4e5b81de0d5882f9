//! Sign-of-deficit defensive forecaster with a provable 1/t Cesàro
//! calibration rate, adversarial sequence sources, and the witness that
//! the forecaster is not a conjugate Bayes predictive at any sample size.
//!
//! The policy predicts 1 when the running deficit `sum(x) - sum(p)` is
//! positive, 0 when negative, 1/2 at zero. Each round then moves the
//! deficit toward zero or leaves `|deficit| <= 1`, so the calibration
//! error `|deficit| / t` is at most `1/t` on every sequence, adversarial
//! ones included.

use rand::Rng;
use serde::Serialize;

use crate::bernoulli::ConjugatePredictor;
use crate::error::{LabError, Result};
use crate::harness::derive_substream;
use crate::scalar::Real;

// ---------------------------------------------------------------------------
// CalibrationLedger
// ---------------------------------------------------------------------------

/// Running prediction/outcome sums. The deficit is derived, not stored,
/// so `deficit == sum_x - sum_p` holds exactly by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CalibrationLedger<F> {
    pub t: usize,
    pub sum_p: F,
    pub sum_x: F,
}

impl<F: Real> CalibrationLedger<F> {
    pub fn new() -> Self {
        Self {
            t: 0,
            sum_p: F::zero(),
            sum_x: F::zero(),
        }
    }

    /// Signed deficit `sum(x) - sum(p)`.
    pub fn deficit(&self) -> F {
        self.sum_x - self.sum_p
    }
}

impl<F: Real> Default for CalibrationLedger<F> {
    fn default() -> Self {
        Self::new()
    }
}

/// The defensive prediction for the current ledger: 1 above zero deficit,
/// 0 below, 1/2 at zero.
pub fn defensive_predict<F: Real>(ledger: &CalibrationLedger<F>) -> F {
    let d = ledger.deficit();
    if d > F::zero() {
        F::one()
    } else if d < F::zero() {
        F::zero()
    } else {
        F::from_f64_lossy(0.5)
    }
}

/// Record one round. `p` must be the prediction issued for this ledger
/// (the deficit bound below relies on that); `x` is the realized outcome.
pub fn ledger_update<F: Real>(
    ledger: &CalibrationLedger<F>,
    p: F,
    x: bool,
) -> Result<CalibrationLedger<F>> {
    if !(p >= F::zero() && p <= F::one()) {
        return Err(LabError::domain(format!(
            "prediction must lie in [0,1], got {p}"
        )));
    }
    Ok(CalibrationLedger {
        t: ledger.t + 1,
        sum_p: ledger.sum_p + p,
        sum_x: ledger.sum_x + if x { F::one() } else { F::zero() },
    })
}

/// Cesàro calibration error `|mean(x) - mean(p)| = |deficit| / t`.
pub fn calibration_error<F: Real>(ledger: &CalibrationLedger<F>) -> Result<F> {
    if ledger.t == 0 {
        return Err(LabError::param(
            "calibration error undefined before the first round".to_string(),
        ));
    }
    Ok(ledger.deficit().abs() / F::from_count(ledger.t))
}

// ---------------------------------------------------------------------------
// Sequence sources and the calibration experiment
// ---------------------------------------------------------------------------

/// Outcome generators the forecaster is run against.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum SequenceSource {
    /// I.i.d. Bernoulli(p) on a seeded substream.
    IidBernoulli { p: f64 },
    /// Deterministic cycle through the pattern.
    Periodic { pattern: Vec<bool> },
    /// Adaptive adversary opposing each prediction: emits 0 against
    /// predictions >= 1/2 and 1 against predictions < 1/2.
    AdaptiveAdversary,
    /// The constant sequence.
    Constant { value: bool },
}

impl SequenceSource {
    pub fn label(&self) -> &'static str {
        match self {
            SequenceSource::IidBernoulli { .. } => "iid",
            SequenceSource::Periodic { .. } => "periodic",
            SequenceSource::AdaptiveAdversary => "adversary",
            SequenceSource::Constant { .. } => "constant",
        }
    }

    fn next<R: Rng>(&self, t: usize, prediction: f64, rng: &mut R) -> bool {
        match self {
            SequenceSource::IidBernoulli { p } => rng.gen::<f64>() < *p,
            SequenceSource::Periodic { pattern } => pattern[t % pattern.len()],
            SequenceSource::AdaptiveAdversary => prediction < 0.5,
            SequenceSource::Constant { value } => *value,
        }
    }

    fn validate(&self) -> Result<()> {
        match self {
            SequenceSource::IidBernoulli { p } if !(*p >= 0.0 && *p <= 1.0) => Err(
                LabError::domain(format!("Bernoulli rate must lie in [0,1], got {p}")),
            ),
            SequenceSource::Periodic { pattern } if pattern.is_empty() => {
                Err(LabError::Empty("periodic pattern"))
            }
            _ => Ok(()),
        }
    }
}

/// Trace of one defensive-forecasting run.
#[derive(Debug, Clone, Serialize)]
pub struct CesaroReport {
    pub source: String,
    pub horizon: usize,
    pub seed: u64,
    /// `|deficit| / t` after every round.
    pub errors: Vec<f64>,
    pub max_abs_deficit: f64,
    pub final_error: f64,
}

/// Run the forecaster against a source for `horizon` rounds, recording
/// the per-round calibration error. The final error is at most
/// `1/horizon` on every source.
pub fn run_cesaro_experiment(
    source: &SequenceSource,
    horizon: usize,
    seed: u64,
) -> Result<CesaroReport> {
    if horizon == 0 {
        return Err(LabError::param("horizon must be >= 1".to_string()));
    }
    source.validate()?;
    let mut rng = derive_substream(seed, 0);
    let mut ledger = CalibrationLedger::<f64>::new();
    let mut errors = Vec::with_capacity(horizon);
    let mut max_abs_deficit = 0.0f64;
    for t in 0..horizon {
        let p = defensive_predict(&ledger);
        let x = source.next(t, p, &mut rng);
        ledger = ledger_update(&ledger, p, x)?;
        max_abs_deficit = max_abs_deficit.max(ledger.deficit().abs());
        errors.push(calibration_error(&ledger)?);
    }
    Ok(CesaroReport {
        source: source.label().to_string(),
        horizon,
        seed,
        final_error: *errors.last().expect("horizon >= 1"),
        errors,
        max_abs_deficit,
    })
}

// ---------------------------------------------------------------------------
// Non-Bayes witness
// ---------------------------------------------------------------------------

/// A history on which the defensive prediction is separated from every
/// conjugate predictive in the grid.
#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    /// The witness history, if one was found within the horizon.
    pub witness: Option<Vec<bool>>,
    /// Defensive prediction after the witness history.
    pub defensive_prediction: f64,
    /// Smallest gap to any grid predictive at the witness.
    pub min_gap: f64,
    pub grid_size: usize,
    pub tolerance: f64,
}

fn defensive_after(history: &[bool]) -> f64 {
    let mut ledger = CalibrationLedger::<f64>::new();
    for &x in history {
        let p = defensive_predict(&ledger);
        ledger = ledger_update(&ledger, p, x).expect("valid policy prediction");
    }
    defensive_predict(&ledger)
}

/// Search histories (shortest first) for one where the defensive
/// prediction differs from `predict(s, n)` of every predictor in the
/// grid by more than the tolerance. Histories after a first outcome give
/// extreme predictions (0 or 1), which no interior conjugate predictive
/// matches, so a depth-1 witness exists whenever the grid's predictives
/// are bounded away from the extremes.
pub fn non_bayes_witness(
    horizon: usize,
    predictor_grid: &[ConjugatePredictor<f64>],
) -> Result<WitnessReport> {
    if predictor_grid.is_empty() {
        return Err(LabError::Empty("predictor grid"));
    }
    if horizon == 0 || horizon > 16 {
        return Err(LabError::param(format!(
            "witness search horizon must lie in 1..=16, got {horizon}"
        )));
    }
    let tolerance = 1e-3;
    for depth in 1..=horizon {
        for bits in 0u32..(1 << depth) {
            let history: Vec<bool> = (0..depth).map(|i| bits >> i & 1 == 1).collect();
            let defensive = defensive_after(&history);
            let s = history.iter().filter(|&&x| x).count();
            let min_gap = predictor_grid
                .iter()
                .map(|pred| {
                    let p = pred.predict(s, depth).expect("s <= depth");
                    (p - defensive).abs()
                })
                .fold(f64::INFINITY, f64::min);
            if min_gap > tolerance {
                return Ok(WitnessReport {
                    witness: Some(history),
                    defensive_prediction: defensive,
                    min_gap,
                    grid_size: predictor_grid.len(),
                    tolerance,
                });
            }
        }
    }
    Ok(WitnessReport {
        witness: None,
        defensive_prediction: f64::NAN,
        min_gap: 0.0,
        grid_size: predictor_grid.len(),
        tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn policy_values() {
        let fresh = CalibrationLedger::<f64>::new();
        assert_eq!(defensive_predict(&fresh), 0.5);
        let pos = CalibrationLedger {
            t: 1,
            sum_p: 0.0,
            sum_x: 0.7,
        };
        assert_eq!(defensive_predict(&pos), 1.0);
        let neg = CalibrationLedger {
            t: 1,
            sum_p: 0.3,
            sum_x: 0.0,
        };
        assert_eq!(defensive_predict(&neg), 0.0);
    }

    #[test]
    fn ledger_arithmetic() {
        let l = CalibrationLedger::<f64>::new();
        let l = ledger_update(&l, 0.5, true).unwrap();
        assert_abs_diff_eq!(l.deficit(), 0.5, epsilon = 1e-15);
        let l2 = ledger_update(&l, 1.0, false).unwrap();
        assert_abs_diff_eq!(l2.deficit(), -0.5, epsilon = 1e-15);
        let l3 = ledger_update(&l2, 0.0, true).unwrap();
        assert_abs_diff_eq!(l3.deficit(), 0.5, epsilon = 1e-15);
        assert!(ledger_update(&l, 1.5, true).is_err());
        assert!(ledger_update(&l, -0.1, true).is_err());
    }

    #[test]
    fn calibration_error_examples() {
        let l = CalibrationLedger::<f64>::new();
        assert!(calibration_error(&l).is_err());
        let l = ledger_update(&l, 0.5, true).unwrap();
        assert_abs_diff_eq!(calibration_error(&l).unwrap(), 0.5, epsilon = 1e-15);
        let balanced = CalibrationLedger {
            t: 10,
            sum_p: 4.0,
            sum_x: 4.0,
        };
        assert_eq!(calibration_error(&balanced).unwrap(), 0.0);
    }

    #[test]
    fn deficit_bounded_on_all_sources() {
        let sources = [
            SequenceSource::IidBernoulli { p: 0.5 },
            SequenceSource::IidBernoulli { p: 0.9 },
            SequenceSource::Periodic {
                pattern: vec![true, true, false],
            },
            SequenceSource::AdaptiveAdversary,
            SequenceSource::Constant { value: true },
        ];
        for source in &sources {
            let rep = run_cesaro_experiment(source, 20_000, 7).unwrap();
            assert!(
                rep.max_abs_deficit <= 1.0 + 1e-12,
                "deficit {} on {}",
                rep.max_abs_deficit,
                rep.source
            );
            assert!(
                rep.final_error <= 1.0 / 20_000.0 + 1e-15,
                "final error {} on {}",
                rep.final_error,
                rep.source
            );
            // 1/t envelope holds along the whole path
            for (t, &e) in rep.errors.iter().enumerate() {
                assert!(e <= 1.0 / (t as f64 + 1.0) + 1e-15);
            }
        }
    }

    #[test]
    fn constant_sequence_small_horizon() {
        let rep = run_cesaro_experiment(&SequenceSource::Constant { value: true }, 100, 1).unwrap();
        assert!(rep.final_error <= 0.01 + 1e-15);
    }

    #[test]
    fn experiment_is_deterministic() {
        let src = SequenceSource::IidBernoulli { p: 0.3 };
        let a = run_cesaro_experiment(&src, 5000, 42).unwrap();
        let b = run_cesaro_experiment(&src, 5000, 42).unwrap();
        assert_eq!(a.errors, b.errors);
    }

    #[test]
    fn witness_found_after_single_outcome() {
        // depth-1 histories force extreme defensive predictions
        assert_eq!(defensive_after(&[true]), 1.0);
        assert_eq!(defensive_after(&[false]), 0.0);
        // empty history coincides with the symmetric conjugate prediction
        assert_eq!(defensive_after(&[]), 0.5);

        let grid: Vec<ConjugatePredictor<f64>> = [0.5, 1.0, 2.0, 5.0]
            .iter()
            .flat_map(|&a| {
                [0.5, 1.0, 2.0, 5.0]
                    .iter()
                    .map(move |&b| ConjugatePredictor::new(a, b).unwrap())
                    .collect::<Vec<_>>()
            })
            .collect();
        let rep = non_bayes_witness(8, &grid).unwrap();
        let witness = rep.witness.expect("witness exists");
        assert_eq!(witness.len(), 1);
        assert!(rep.min_gap > rep.tolerance);
        assert!(rep.defensive_prediction == 0.0 || rep.defensive_prediction == 1.0);
        assert!(non_bayes_witness(8, &[]).is_err());
        assert!(non_bayes_witness(0, &grid).is_err());
    }

    #[test]
    fn generic_kernel_works_in_f32() {
        let l = CalibrationLedger::<f32>::new();
        let l = ledger_update(&l, defensive_predict(&l), true).unwrap();
        assert_eq!(l.deficit(), 0.5);
        assert_eq!(defensive_predict(&l), 1.0);
        assert_eq!(calibration_error(&l).unwrap(), 0.5);
    }

    #[test]
    fn mixed_history_predictions_stay_extreme_or_half() {
        // the defensive prediction after any nonempty history is 0, 1/2,
        // or 1; interior conjugate predictives never match the extremes
        for bits in 0u32..(1 << 6) {
            let history: Vec<bool> = (0..6).map(|i| bits >> i & 1 == 1).collect();
            let p = defensive_after(&history);
            assert!(p == 0.0 || p == 0.5 || p == 1.0, "prediction {p}");
        }
    }
}
