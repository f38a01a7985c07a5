//! Phase-type distributions: absorption times of finite Markov jump
//! processes with parameters (π, T) and exit vector t = -T·e.

use super::{DistError, RngStream};
use crate::numerics::{mat_exp, solve, SquareMatrix};

const PROB_TOL: f64 = 1e-12;

/// Phase-type distribution over p transient states.
///
/// Density f(x) = π·exp(Tx)·t and distribution F(x) = 1 - π·exp(Tx)·e.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseType {
    pi: Vec<f64>,
    sub_intensity: SquareMatrix,
    exit: Vec<f64>,
    /// π·(-T)^{-1}, cached for the mean and the stationary-excess law.
    pi_resolvent: Vec<f64>,
    mean: f64,
    /// Per-state jump distribution of the embedded chain: holding rate and
    /// cumulative probabilities over (p successor states, then absorption).
    hold_rates: Vec<f64>,
    jump_cumulative: Vec<Vec<f64>>,
}

impl PhaseType {
    pub fn new(pi: Vec<f64>, sub_intensity: SquareMatrix) -> Result<Self, DistError> {
        let p = sub_intensity.order();
        if pi.len() != p {
            return Err(DistError::PhaseType(format!(
                "initial vector has length {}, matrix order is {p}",
                pi.len()
            )));
        }
        if pi.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(DistError::PhaseType(
                "initial probabilities must be finite and nonnegative".into(),
            ));
        }
        let pi_sum: f64 = pi.iter().sum();
        if (pi_sum - 1.0).abs() > PROB_TOL {
            return Err(DistError::PhaseType(format!(
                "initial probabilities sum to {pi_sum}, expected 1"
            )));
        }
        let mut exit = vec![0.0; p];
        for i in 0..p {
            let diag = sub_intensity.get(i, i);
            if !(diag < 0.0) {
                return Err(DistError::PhaseType(format!(
                    "diagonal entry T[{i}][{i}] = {diag} must be negative"
                )));
            }
            let mut row_sum = 0.0;
            for j in 0..p {
                let v = sub_intensity.get(i, j);
                if i != j && v < 0.0 {
                    return Err(DistError::PhaseType(format!(
                        "off-diagonal entry T[{i}][{j}] = {v} must be nonnegative"
                    )));
                }
                row_sum += v;
            }
            if row_sum > PROB_TOL {
                return Err(DistError::PhaseType(format!(
                    "row {i} of T sums to {row_sum} > 0"
                )));
            }
            exit[i] = (-row_sum).max(0.0);
        }

        // π·(-T)^{-1} via (-T)ᵀ y = π. A singular T means some states never
        // reach absorption, which is not a probability distribution.
        let neg_t = sub_intensity.scale(-1.0);
        let pi_resolvent = solve(&neg_t.transpose(), &pi)
            .map_err(|e| DistError::PhaseType(format!("sub-intensity matrix unusable: {e}")))?;
        let mean: f64 = pi_resolvent.iter().sum();
        if !(mean > 0.0) || !mean.is_finite() {
            return Err(DistError::PhaseType(format!("mean {mean} must be positive")));
        }

        let mut hold_rates = vec![0.0; p];
        let mut jump_cumulative = Vec::with_capacity(p);
        for i in 0..p {
            let rate = -sub_intensity.get(i, i);
            hold_rates[i] = rate;
            let mut cumulative = Vec::with_capacity(p + 1);
            let mut acc = 0.0;
            for j in 0..p {
                if j != i {
                    acc += sub_intensity.get(i, j) / rate;
                }
                cumulative.push(acc);
            }
            cumulative.push(acc + exit[i] / rate);
            jump_cumulative.push(cumulative);
        }

        Ok(Self {
            pi,
            sub_intensity,
            exit,
            pi_resolvent,
            mean,
            hold_rates,
            jump_cumulative,
        })
    }

    /// Exponential distribution with the given rate (the p = 1 case).
    pub fn exponential(rate: f64) -> Result<Self, DistError> {
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(DistError::InvalidParameter {
                name: "rate",
                reason: format!("must be positive and finite, got {rate}"),
            });
        }
        let t = SquareMatrix::new(1, vec![-rate]).expect("1x1 matrix");
        Self::new(vec![1.0], t)
    }

    /// Erlang distribution: `stages` sequential exponential phases of the
    /// given rate.
    pub fn erlang(stages: usize, rate: f64) -> Result<Self, DistError> {
        if stages == 0 {
            return Err(DistError::InvalidParameter {
                name: "stages",
                reason: "must be at least 1".into(),
            });
        }
        if !(rate > 0.0) || !rate.is_finite() {
            return Err(DistError::InvalidParameter {
                name: "rate",
                reason: format!("must be positive and finite, got {rate}"),
            });
        }
        let mut t = SquareMatrix::zeros(stages);
        for i in 0..stages {
            t.set(i, i, -rate);
            if i + 1 < stages {
                t.set(i, i + 1, rate);
            }
        }
        let mut pi = vec![0.0; stages];
        pi[0] = 1.0;
        Self::new(pi, t)
    }

    /// Probabilistic mixture of phase-type laws (block-diagonal assembly).
    pub fn mixture(components: &[(f64, PhaseType)]) -> Result<Self, DistError> {
        if components.is_empty() {
            return Err(DistError::InvalidParameter {
                name: "components",
                reason: "mixture needs at least one component".into(),
            });
        }
        let weight_sum: f64 = components.iter().map(|(w, _)| w).sum();
        if components.iter().any(|(w, _)| *w < 0.0) || (weight_sum - 1.0).abs() > PROB_TOL {
            return Err(DistError::InvalidParameter {
                name: "components",
                reason: format!("weights must be nonnegative and sum to 1, got {weight_sum}"),
            });
        }
        let total: usize = components.iter().map(|(_, c)| c.order()).sum();
        let mut t = SquareMatrix::zeros(total);
        let mut pi = Vec::with_capacity(total);
        let mut offset = 0;
        for (w, c) in components {
            let p = c.order();
            for i in 0..p {
                pi.push(w * c.pi[i]);
                for j in 0..p {
                    t.set(offset + i, offset + j, c.sub_intensity.get(i, j));
                }
            }
            offset += p;
        }
        Self::new(pi, t)
    }

    pub fn order(&self) -> usize {
        self.pi.len()
    }

    pub fn initial(&self) -> &[f64] {
        &self.pi
    }

    pub fn sub_intensity(&self) -> &SquareMatrix {
        &self.sub_intensity
    }

    pub fn exit(&self) -> &[f64] {
        &self.exit
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// π·(-T)^{-1} (row vector).
    pub fn pi_resolvent(&self) -> &[f64] {
        &self.pi_resolvent
    }

    pub fn ccdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 1.0;
        }
        if self.order() == 1 {
            return (self.sub_intensity.get(0, 0) * x).exp();
        }
        let e = mat_exp(&self.sub_intensity, x).expect("validated sub-intensity");
        e.row_vec_mul(&self.pi).iter().sum::<f64>().clamp(0.0, 1.0)
    }

    pub fn cdf(&self, x: f64) -> f64 {
        1.0 - self.ccdf(x)
    }

    pub fn density(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        if self.order() == 1 {
            let rate = -self.sub_intensity.get(0, 0);
            return rate * (self.sub_intensity.get(0, 0) * x).exp();
        }
        let e = mat_exp(&self.sub_intensity, x).expect("validated sub-intensity");
        let left = e.row_vec_mul(&self.pi);
        left.iter().zip(&self.exit).map(|(a, b)| a * b).sum()
    }

    /// Stationary-excess (integrated tail) law: same T, initial vector
    /// ν = π·(-T)^{-1} / mean.
    pub fn excess(&self) -> PhaseType {
        let nu: Vec<f64> = self.pi_resolvent.iter().map(|v| v / self.mean).collect();
        PhaseType::new(nu, self.sub_intensity.clone())
            .expect("excess of a valid phase-type law is valid")
    }

    /// Absorption-time sample via the embedded jump chain.
    pub fn sample(&self, rng: &mut RngStream) -> f64 {
        let p = self.order();
        let mut state = if p == 1 {
            0
        } else {
            rng.categorical(&self.pi)
        };
        let mut total = 0.0;
        loop {
            total += rng.exponential(self.hold_rates[state]);
            let cumulative = &self.jump_cumulative[state];
            // cumulative[p-1] is the total probability of moving to another
            // transient state; when it is zero absorption is certain and no
            // draw is spent (this covers the exponential case).
            if cumulative[p - 1] <= 0.0 {
                return total;
            }
            let u = rng.uniform();
            let mut next = p;
            for (j, c) in cumulative.iter().enumerate().take(p) {
                if u <= *c {
                    next = j;
                    break;
                }
            }
            if next >= p {
                return total;
            }
            state = next;
        }
    }
}
