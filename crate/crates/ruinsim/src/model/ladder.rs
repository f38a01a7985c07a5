//! Phase-type ladder representation of the all-time maximum of a compound
//! Poisson claim surplus process.
//!
//! For arrival rate β and phase-type claims (π, T), the maximum M satisfies
//! P(M > u) = α₊·exp(Q·u)·e with α₊ = β·π·(-T)^{-1} and Q = T + t·α₊. The
//! mass at zero is 1 - α₊·e = 1 - β·E[claim].

use crate::dists::PhaseType;
use crate::numerics::{mat_exp, SquareMatrix};

#[derive(Debug, Clone)]
pub(crate) struct LadderRep {
    /// Defective initial row vector α₊ (α₊·e = traffic intensity).
    pub init: Vec<f64>,
    /// Ladder generator Q = T + t·α₊.
    pub generator: SquareMatrix,
    /// Absorption rates -Q·e.
    pub exit: Vec<f64>,
}

impl LadderRep {
    pub fn new(arrival: f64, claims: &PhaseType) -> Self {
        let p = claims.order();
        let init: Vec<f64> = claims.pi_resolvent().iter().map(|v| arrival * v).collect();
        let t = claims.sub_intensity();
        let exit_vec = claims.exit();
        let mut generator = SquareMatrix::zeros(p);
        for i in 0..p {
            for j in 0..p {
                generator.set(i, j, t.get(i, j) + exit_vec[i] * init[j]);
            }
        }
        let exit = generator.row_sums().iter().map(|s| -s).collect();
        Self {
            init,
            generator,
            exit,
        }
    }

    /// Total initial mass α₊·e.
    pub fn mass(&self) -> f64 {
        self.init.iter().sum()
    }

    /// P(M > u) = α₊·exp(Q·u)·e.
    pub fn ccdf(&self, u: f64) -> f64 {
        debug_assert!(u >= 0.0);
        if u <= 0.0 {
            return self.mass();
        }
        if self.generator.order() == 1 {
            return self.init[0] * (self.generator.get(0, 0) * u).exp();
        }
        let e = mat_exp(&self.generator, u).expect("valid ladder generator");
        e.row_vec_mul(&self.init).iter().sum()
    }

    /// Density of the continuous part, α₊·exp(Q·u)·(-Q·e).
    pub fn density(&self, u: f64) -> f64 {
        debug_assert!(u >= 0.0);
        if self.generator.order() == 1 {
            return self.init[0] * (self.generator.get(0, 0) * u).exp() * self.exit[0];
        }
        let e = mat_exp(&self.generator, u).expect("valid ladder generator");
        let left = e.row_vec_mul(&self.init);
        left.iter().zip(&self.exit).map(|(a, b)| a * b).sum()
    }

    /// Representation of the sum of two independent copies of the maximum:
    /// atom (1-ρ)² at zero plus a defective phase-type part on 2p states.
    pub fn two_fold(&self) -> LadderRep {
        let p = self.generator.order();
        let mass = self.mass();
        let beta: Vec<f64> = self.init.iter().map(|v| v / mass).collect();
        let mut generator = SquareMatrix::zeros(2 * p);
        for i in 0..p {
            for j in 0..p {
                generator.set(i, j, self.generator.get(i, j));
                generator.set(p + i, p + j, self.generator.get(i, j));
                generator.set(i, p + j, self.exit[i] * beta[j]);
            }
        }
        let mut init = vec![0.0; 2 * p];
        for j in 0..p {
            // One copy positive and one zero (either order), or both positive.
            init[j] = mass * self.init[j];
            init[p + j] = 2.0 * (1.0 - mass) * self.init[j];
        }
        let exit = generator.row_sums().iter().map(|s| -s).collect();
        LadderRep {
            init,
            generator,
            exit,
        }
    }
}
