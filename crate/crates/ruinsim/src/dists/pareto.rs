//! Shifted (Lomax) Pareto distribution and its stationary excess.

use super::{DistError, RngStream};

/// Shifted Pareto with tail F̄(u) = (1 + u/b)^{-a}, a > 1, b > 0.
///
/// The stationary excess has tail F̄ₑ(u) = (1 + u/b)^{-(a-1)} and the mean is
/// b/(a-1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftedPareto {
    shape: f64,
    scale: f64,
}

impl ShiftedPareto {
    pub fn new(shape: f64, scale: f64) -> Result<Self, DistError> {
        if !(shape > 1.0) || !shape.is_finite() {
            return Err(DistError::InvalidParameter {
                name: "a",
                reason: format!("shape must exceed 1 for a finite mean, got {shape}"),
            });
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(DistError::InvalidParameter {
                name: "b",
                reason: format!("scale must be positive, got {scale}"),
            });
        }
        Ok(Self { shape, scale })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn mean(&self) -> f64 {
        self.scale / (self.shape - 1.0)
    }

    pub fn ccdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 1.0;
        }
        (1.0 + u / self.scale).powf(-self.shape)
    }

    pub fn excess_ccdf(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 1.0;
        }
        (1.0 + u / self.scale).powf(-(self.shape - 1.0))
    }

    pub fn excess_cdf(&self, u: f64) -> f64 {
        1.0 - self.excess_ccdf(u)
    }

    /// Inverse-transform sample of the stationary excess:
    /// u = b (U^{-1/(a-1)} - 1).
    pub fn excess_sample(&self, rng: &mut RngStream) -> f64 {
        let u = rng.uniform();
        self.scale * (u.powf(-1.0 / (self.shape - 1.0)) - 1.0)
    }
}
