//! Rare-event Monte Carlo engine for ultimate ruin probabilities in the
//! Cramér–Lundberg model with mixed phase-type and heavy-tailed claims.
//!
//! The engine carries two series representations of the ruin probability: the
//! classical Pollaczek–Khinchine geometric compound of mixture excess claims,
//! and a discard series built around the base model that drops the heavy
//! claims, for which the ruin probability is exact and phase-type. Each
//! series is estimated by crude Monte Carlo, by a max-of-heavy-terms control
//! variate, and by a conditional (Asmussen–Kroese) estimator, with the
//! analytic layer providing truncation approximations, error bounds, tail
//! asymptotics and asymptotic variance-reduction constants for verification.
//!
//! Modules, bottom up:
//!
//! * [`numerics`]: exponential integral, small matrix exponentials,
//!   adaptive quadrature for convolution tails.
//! * [`dists`]: phase-type, shifted Pareto, geometric and mixture-excess
//!   distributions plus deterministic random streams.
//! * [`model`]: derived traffic intensities, the exact discard-model ruin
//!   probability, convolution-tail closed forms, and the target-variable
//!   samplers.
//! * [`estimators`]: the six estimator variants and the control-variate
//!   combiner.
//! * [`analysis`]: z_n approximations, error bounds and variance constants.
//! * [`harness`]: config files, figure presets, the experiment runner and
//!   CSV output.

pub mod analysis;
pub mod dists;
pub mod estimators;
pub mod harness;
pub mod model;
pub mod numerics;

pub use estimators::{EstimatorKind, EstimatorResult, Method, Series};
pub use model::{DerivedRates, Load, Model, ModelParams};
