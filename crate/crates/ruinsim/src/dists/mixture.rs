//! Stationary excess of the mixture claim size.
//!
//! The excess claim C_e is a two-point mixture: with probability
//! w_light/(w_light + w_heavy) it is the light-component excess P_e, and
//! otherwise the heavy-component excess H_e. In the risk model the weights
//! are the discard load ρ_d and the heavy load ε·η_H.

use super::{DistError, HeavyClaim, PhaseType, RngStream};

#[derive(Debug, Clone)]
pub struct MixtureExcess {
    light_weight: f64,
    heavy_weight: f64,
    light_excess: PhaseType,
    heavy: HeavyClaim,
}

impl MixtureExcess {
    pub fn new(
        light_weight: f64,
        heavy_weight: f64,
        light_excess: PhaseType,
        heavy: HeavyClaim,
    ) -> Result<Self, DistError> {
        if !(light_weight > 0.0) || !(heavy_weight > 0.0) {
            return Err(DistError::InvalidParameter {
                name: "mixture weights",
                reason: format!("weights must be positive, got {light_weight}, {heavy_weight}"),
            });
        }
        Ok(Self {
            light_weight,
            heavy_weight,
            light_excess,
            heavy,
        })
    }

    /// Probability that an excess claim comes from the light component.
    pub fn light_probability(&self) -> f64 {
        self.light_weight / (self.light_weight + self.heavy_weight)
    }

    /// F̄_{C_e}(u) = (w_l·F̄_{P_e}(u) + w_h·F̄_{H_e}(u)) / (w_l + w_h).
    pub fn ccdf(&self, u: f64) -> f64 {
        (self.light_weight * self.light_excess.ccdf(u)
            + self.heavy_weight * self.heavy.excess_ccdf(u))
            / (self.light_weight + self.heavy_weight)
    }

    pub fn cdf(&self, u: f64) -> f64 {
        1.0 - self.ccdf(u)
    }

    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        if rng.bernoulli(self.light_probability()) {
            self.light_excess.sample(rng)
        } else {
            self.heavy.excess_sample(rng)
        }
    }
}
