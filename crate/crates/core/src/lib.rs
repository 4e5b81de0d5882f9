//! A laboratory for four admissibility geometries of sequential prediction:
//! risk dominance over convex risk sets, anytime-valid e-processes,
//! marginal-coverage conformal sets, and Cesàro-calibrated defensive
//! forecasting.
//!
//! The mathematical kernel (losses, extended-real risk algebra, predictive
//! rules, boundary tracing, closed-form Gaussian risks) is generic over the
//! scalar type via [`scalar::Real`]; the Monte-Carlo experiment layer and
//! the classification matrix are concrete in `f64`. Type aliases at the
//! crate root pin the common instantiations.
//!
//! Modules map onto the subsystems:
//!
//! * [`risk`] — extended-real risk values, log loss, dominance order
//! * [`geometry`] — exact Bernoulli risk vectors, lower-boundary tracing,
//!   supporting-hyperplane certificates
//! * [`bernoulli`] — conjugate and plug-in predictors, martingale checks,
//!   dominance certificates, the average-log-loss experiment
//! * [`eprocess`] — likelihood-ratio e-process, Ville stopping, the
//!   type-I-error experiment against naive peeking
//! * [`conformal`] — split-conformal calibration, the covariate-shift
//!   experiment, the binary full-conformal set with exact coverage
//! * [`defensive`] — sign-of-deficit forecaster with a 1/t calibration bound
//! * [`gaussian`] — Gaussian location laboratory under squared loss
//! * [`matrix`] — procedures-by-criteria classification matrix
//! * [`harness`] — seeded substreams and summary statistics
//! * [`report`] — CSV/JSON table emission with lossless `inf` tokens

pub mod bernoulli;
pub mod conformal;
pub mod defensive;
pub mod eprocess;
pub mod error;
pub mod gaussian;
pub mod geometry;
pub mod harness;
pub mod matrix;
pub mod numeric;
pub mod report;
pub mod risk;
pub mod scalar;

pub use error::{LabError, Result};
pub use scalar::Real;

/// Extended-real risk value over `f64`, the default instantiation.
pub type Risk64 = risk::RiskValue<f64>;
/// Extended-real risk value over `f32`.
pub type Risk32 = risk::RiskValue<f32>;
/// Per-parameter risk profile over `f64`.
pub type RiskVector64 = risk::RiskVector<f64>;
/// Finite parameter space over `f64`.
pub type ParamSpace64 = risk::FiniteParamSpace<f64>;
/// Prior over `f64`.
pub type Prior64 = risk::Prior<f64>;
/// Bernoulli predictive rule over `f64`.
pub type PredictiveRule64 = geometry::PredictiveRule<f64>;
/// Conjugate Beta predictor over `f64`.
pub type ConjugatePredictor64 = bernoulli::ConjugatePredictor<f64>;
