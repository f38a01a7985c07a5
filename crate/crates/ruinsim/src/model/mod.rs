//! The Cramér–Lundberg mixture model and its discard base model.
//!
//! Claims arrive at Poisson rate λ against unit premium income. Each claim is
//! light (phase-type P) with probability 1-ε and heavy (H) with probability
//! ε. Discarding the heavy claims leaves a compound Poisson model with rate
//! λ_d = (1-ε)λ and phase-type claims, whose all-time claim-surplus maximum
//! M_d has the exact tail ψ_d(u) = α₊·exp(Qu)·e.
//!
//! The ruin probability of the full model expands around the discard model:
//!
//!   ψ(u) = r·ψ_d(u) + r·q·G₁(u) + R(u),
//!
//! with q = εη_H/(1-ρ_d), r = 1-q = (1-ρ)/(1-ρ_d),
//! G₁(u) = P(M⁰ + M¹ + H_e > u), and R(u) = q²·P(V > u) for the compound
//! target variable V sampled here. The classical Pollaczek–Khinchine route
//! is carried alongside: ψ(u) = (1-ρ)ρ·F̄_{C_e}(u) + ρ²·P(V° > u) with C_e
//! the mixture excess claim.

mod closed_form;
mod ladder;

use crate::dists::{
    DistError, GeometricLaw, HeavyClaim, MixtureExcess, PhaseType, RngStream, ShiftedPareto,
};
use crate::numerics::{tail_of_sum, NumericsError, QuadratureSpec};
use closed_form::ExpParetoClosedForm;
use ladder::LadderRep;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("net profit condition violated: rho = {rho} must lie in (0, 1)")]
    NetProfit { rho: f64 },
    #[error("epsilon must lie in (0, 1), got {0}")]
    Epsilon(f64),
    #[error("arrival rate lambda must be positive and finite, got {0}")]
    Arrival(f64),
    #[error(transparent)]
    Dist(#[from] DistError),
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// How the load is specified: the arrival rate directly, or the target
/// traffic intensity ρ from which λ is derived. Exactly one applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Load {
    Arrival(f64),
    TrafficIntensity(f64),
}

/// Model inputs: component distributions, mixing probability, load.
#[derive(Debug, Clone)]
pub struct ModelParams {
    pub light: PhaseType,
    pub heavy: HeavyClaim,
    pub epsilon: f64,
    pub load: Load,
}

impl ModelParams {
    /// The exponential-light / Pareto-heavy family used throughout the
    /// numerical experiments.
    pub fn exp_pareto(
        mu: f64,
        shape: f64,
        scale: f64,
        epsilon: f64,
        load: Load,
    ) -> Result<Self, ModelError> {
        Ok(Self {
            light: PhaseType::exponential(mu)?,
            heavy: HeavyClaim::from_pareto(ShiftedPareto::new(shape, scale)?),
            epsilon,
            load,
        })
    }
}

/// Traffic intensities and series constants derived from the parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedRates {
    pub lambda: f64,
    pub lambda_d: f64,
    pub mu_light: f64,
    pub mu_heavy: f64,
    /// Total traffic intensity ρ = ρ_d + εη_H.
    pub rho: f64,
    /// Discard-model intensity ρ_d = (1-ε)·λ·μ_P.
    pub rho_d: f64,
    /// Heavy load εη_H = ε·λ·μ_H.
    pub heavy_load: f64,
    /// Series ratio q = εη_H / (1-ρ_d).
    pub q: f64,
    /// Geometric success r = (1-ρ)/(1-ρ_d) = 1-q.
    pub r: f64,
}

/// One replication of the discard-series target variable V.
#[derive(Debug, Clone, Copy)]
pub struct NewSeriesDraw {
    pub total: f64,
    /// The geometric count G (V contains G+2 heavy excess terms).
    pub count: u64,
    /// max{H_{e,1}, ..., H_{e,G+2}} over the same draws.
    pub heavy_max: f64,
}

/// One replication of the Pollaczek–Khinchine target variable V°.
#[derive(Debug, Clone, Copy)]
pub struct PkSeriesDraw {
    pub total: f64,
    /// The geometric count K (V° is a sum of K+2 excess claims).
    pub count: u64,
    /// max{C_{e,1}, ..., C_{e,K+2}} over the same draws.
    pub ce_max: f64,
}

/// Validated model with precomputed representations.
#[derive(Debug, Clone)]
pub struct Model {
    params: ModelParams,
    rates: DerivedRates,
    light_excess: PhaseType,
    ladder: LadderRep,
    two_fold: LadderRep,
    closed_form: Option<ExpParetoClosedForm>,
    mixture: MixtureExcess,
    quad: QuadratureSpec,
    count_new: GeometricLaw,
    count_pk: GeometricLaw,
    count_ladder: GeometricLaw,
}

impl Model {
    pub fn new(params: ModelParams) -> Result<Self, ModelError> {
        let epsilon = params.epsilon;
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(ModelError::Epsilon(epsilon));
        }
        let mu_light = params.light.mean();
        let mu_heavy = params.heavy.mean();
        let mean_claim = (1.0 - epsilon) * mu_light + epsilon * mu_heavy;
        let (lambda, rho) = match params.load {
            Load::Arrival(lambda) => (lambda, lambda * mean_claim),
            Load::TrafficIntensity(rho) => (rho / mean_claim, rho),
        };
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(ModelError::Arrival(lambda));
        }
        if !(rho > 0.0 && rho < 1.0) {
            return Err(ModelError::NetProfit { rho });
        }
        let lambda_d = (1.0 - epsilon) * lambda;
        let rho_d = lambda_d * mu_light;
        let heavy_load = epsilon * lambda * mu_heavy;
        let q = heavy_load / (1.0 - rho_d);
        let r = (1.0 - rho) / (1.0 - rho_d);
        let rates = DerivedRates {
            lambda,
            lambda_d,
            mu_light,
            mu_heavy,
            rho,
            rho_d,
            heavy_load,
            q,
            r,
        };

        let light_excess = params.light.excess();
        let ladder = LadderRep::new(lambda_d, &params.light);
        let two_fold = ladder.two_fold();
        let closed_form = ExpParetoClosedForm::detect(&params.light, &params.heavy, rho_d);
        let mixture = MixtureExcess::new(
            rho_d,
            heavy_load,
            light_excess.clone(),
            params.heavy.clone(),
        )?;
        let count_new = GeometricLaw::new(r)?;
        let count_pk = GeometricLaw::new(1.0 - rho)?;
        let count_ladder = GeometricLaw::new(1.0 - rho_d)?;

        Ok(Self {
            params,
            rates,
            light_excess,
            ladder,
            two_fold,
            closed_form,
            mixture,
            quad: QuadratureSpec::default(),
            count_new,
            count_pk,
            count_ladder,
        })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn rates(&self) -> &DerivedRates {
        &self.rates
    }

    pub fn heavy(&self) -> &HeavyClaim {
        &self.params.heavy
    }

    pub fn light_excess(&self) -> &PhaseType {
        &self.light_excess
    }

    pub fn mixture_excess(&self) -> &MixtureExcess {
        &self.mixture
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    /// True when F̄_D and G₁ evaluate through the exponential/Pareto closed
    /// form rather than quadrature.
    pub fn has_closed_form(&self) -> bool {
        self.closed_form.is_some()
    }

    /// Exact discard-model ruin probability ψ_d(u) = α₊·exp(Qu)·e.
    pub fn psi_d_exact(&self, u: f64) -> f64 {
        self.ladder.ccdf(u.max(0.0))
    }

    /// Density of the continuous part of M_d.
    pub fn md_density(&self, x: f64) -> f64 {
        self.ladder.density(x.max(0.0))
    }

    /// F̄_{C_e}(u), the mixture excess tail of the PK route.
    pub fn ccdf_ce(&self, u: f64) -> f64 {
        self.mixture.ccdf(u)
    }

    /// F̄_D(u) = P(M_d + H_e > u): closed form when available, else the
    /// generic convolution quadrature.
    pub fn ccdf_d(&self, u: f64) -> Result<f64, ModelError> {
        match &self.closed_form {
            Some(cf) => Ok(cf.ccdf_d(u)),
            None => self.ccdf_d_quad(u),
        }
    }

    /// Closed-form F̄_D(u), when the model admits it.
    pub fn ccdf_d_closed(&self, u: f64) -> Option<f64> {
        self.closed_form.as_ref().map(|cf| cf.ccdf_d(u))
    }

    /// Quadrature path for F̄_D(u), available for every model.
    pub fn ccdf_d_quad(&self, u: f64) -> Result<f64, ModelError> {
        let atom = 1.0 - self.rates.rho_d;
        let v = tail_of_sum(
            atom,
            |x| self.ladder.density(x),
            |x| self.ladder.ccdf(x),
            |x| self.params.heavy.excess_ccdf(x),
            u,
            &self.quad,
        )?;
        Ok(v.min(1.0))
    }

    /// G₁(u) = P(M⁰ + M¹ + H_e > u).
    pub fn g1(&self, u: f64) -> Result<f64, ModelError> {
        match &self.closed_form {
            Some(cf) => Ok(cf.g1(u)),
            None => self.g1_quad(u),
        }
    }

    pub fn g1_closed(&self, u: f64) -> Option<f64> {
        self.closed_form.as_ref().map(|cf| cf.g1(u))
    }

    pub fn g1_quad(&self, u: f64) -> Result<f64, ModelError> {
        let atom_free = 1.0 - self.rates.rho_d;
        let atom = atom_free * atom_free;
        let v = tail_of_sum(
            atom,
            |x| self.two_fold.density(x),
            |x| self.two_fold.ccdf(x),
            |x| self.params.heavy.excess_ccdf(x),
            u,
            &self.quad,
        )?;
        Ok(v.min(1.0))
    }

    /// Sample of the discard maximum M_d as a geometric compound of
    /// stationary-excess ladder heights.
    pub fn sample_md(&self, rng: &mut RngStream) -> f64 {
        let n = self.count_ladder.sample(rng);
        let mut total = 0.0;
        for _ in 0..n {
            total += self.light_excess.sample(rng);
        }
        total
    }

    /// Sample of D = M_d + H_e.
    pub fn sample_d(&self, rng: &mut RngStream) -> f64 {
        self.sample_md(rng) + self.params.heavy.excess_sample(rng)
    }

    /// Sample of the discard-series target V = M⁰ + Σ_{k=1}^{G+2} (M_k + H_k)
    /// with G ~ Geom(r), together with the count and the heavy-excess max.
    pub fn sample_v_new(&self, rng: &mut RngStream) -> NewSeriesDraw {
        let count = self.count_new.sample(rng);
        let mut total = self.sample_md(rng);
        let mut heavy_max = 0.0f64;
        for _ in 0..count + 2 {
            total += self.sample_md(rng);
            let h = self.params.heavy.excess_sample(rng);
            heavy_max = heavy_max.max(h);
            total += h;
        }
        NewSeriesDraw {
            total,
            count,
            heavy_max,
        }
    }

    /// Sample of the PK target V° = Σ_{k=1}^{K+2} C_{e,k} with K ~ Geom(1-ρ).
    pub fn sample_v_pk(&self, rng: &mut RngStream) -> PkSeriesDraw {
        let count = self.count_pk.sample(rng);
        let mut total = 0.0;
        let mut ce_max = 0.0f64;
        for _ in 0..count + 2 {
            let c = self.mixture.sample(rng);
            ce_max = ce_max.max(c);
            total += c;
        }
        PkSeriesDraw {
            total,
            count,
            ce_max,
        }
    }
}

/// Exact ruin probability of a compound Poisson model with phase-type claims
/// and unit premium rate, via the ladder-height representation.
pub fn ph_ruin_probability(arrival: f64, claims: &PhaseType, u: f64) -> Result<f64, ModelError> {
    if !(arrival > 0.0) || !arrival.is_finite() {
        return Err(ModelError::Arrival(arrival));
    }
    let rho = arrival * claims.mean();
    if !(rho < 1.0) {
        return Err(ModelError::NetProfit { rho });
    }
    Ok(LadderRep::new(arrival, claims).ccdf(u.max(0.0)))
}
