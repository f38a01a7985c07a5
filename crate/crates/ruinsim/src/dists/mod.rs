//! Distribution objects used by the risk model: phase-type laws, the shifted
//! Pareto family, geometric counts, and the stationary-excess mixture.
//!
//! All objects are immutable after construction and validate their parameters
//! up front. Samplers draw from an explicit [`RngStream`]; distinct streams
//! may be used concurrently.

mod geometric;
mod heavy;
mod mixture;
mod pareto;
mod phase_type;
mod rng;

pub use geometric::GeometricLaw;
pub use heavy::HeavyClaim;
pub use mixture::MixtureExcess;
pub use pareto::ShiftedPareto;
pub use phase_type::PhaseType;
pub use rng::RngStream;

use thiserror::Error;

/// Parameter validation failures for distribution objects.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum DistError {
    #[error("invalid {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("phase-type validation failed: {0}")]
    PhaseType(String),
}
