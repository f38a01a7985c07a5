//! The heavy claim component of the mixture model.
//!
//! The production configuration uses a shifted Pareto, which is genuinely
//! heavy-tailed. A phase-type alternative is also supported: it makes the
//! whole claim distribution phase-type, for which the ruin probability has a
//! closed form, and that turns the estimators into something that can be
//! checked against an exact answer.

use super::{DistError, PhaseType, RngStream, ShiftedPareto};

#[derive(Debug, Clone)]
enum HeavyKind {
    Pareto(ShiftedPareto),
    PhaseType { dist: PhaseType, excess: PhaseType },
}

/// Heavy claim-size distribution with its stationary excess.
#[derive(Debug, Clone)]
pub struct HeavyClaim {
    kind: HeavyKind,
}

impl HeavyClaim {
    pub fn pareto(shape: f64, scale: f64) -> Result<Self, DistError> {
        Ok(Self {
            kind: HeavyKind::Pareto(ShiftedPareto::new(shape, scale)?),
        })
    }

    pub fn from_pareto(dist: ShiftedPareto) -> Self {
        Self {
            kind: HeavyKind::Pareto(dist),
        }
    }

    pub fn phase_type(dist: PhaseType) -> Self {
        let excess = dist.excess();
        Self {
            kind: HeavyKind::PhaseType { dist, excess },
        }
    }

    /// The shifted Pareto parameters, when this component is a Pareto.
    pub fn as_pareto(&self) -> Option<&ShiftedPareto> {
        match &self.kind {
            HeavyKind::Pareto(d) => Some(d),
            HeavyKind::PhaseType { .. } => None,
        }
    }

    pub fn mean(&self) -> f64 {
        match &self.kind {
            HeavyKind::Pareto(d) => d.mean(),
            HeavyKind::PhaseType { dist, .. } => dist.mean(),
        }
    }

    pub fn ccdf(&self, u: f64) -> f64 {
        match &self.kind {
            HeavyKind::Pareto(d) => d.ccdf(u),
            HeavyKind::PhaseType { dist, .. } => dist.ccdf(u),
        }
    }

    pub fn excess_ccdf(&self, u: f64) -> f64 {
        match &self.kind {
            HeavyKind::Pareto(d) => d.excess_ccdf(u),
            HeavyKind::PhaseType { excess, .. } => excess.ccdf(u),
        }
    }

    pub fn excess_cdf(&self, u: f64) -> f64 {
        1.0 - self.excess_ccdf(u)
    }

    pub fn excess_sample(&self, rng: &mut RngStream) -> f64 {
        match &self.kind {
            HeavyKind::Pareto(d) => d.excess_sample(rng),
            HeavyKind::PhaseType { excess, .. } => excess.sample(rng),
        }
    }
}
