//! Monte Carlo estimators of the series remainders R(u) (discard series) and
//! R°(u) (Pollaczek–Khinchine series), and the assembly of the ruin
//! probability estimate ψ̂(u).
//!
//! Three families per series: the crude indicator estimator, its regression
//! control variate built from the truncated maximum of the heavy excess
//! terms, and a conditional (Asmussen–Kroese) estimator that integrates out
//! the largest summand, optionally paired with a count control variate.
//!
//! Replications are independent; replication i draws from the deterministic
//! stream (seed, i), so results do not depend on the number of worker
//! threads. The control and the target are always evaluated on the same
//! replication draws.

use crate::analysis;
use crate::dists::RngStream;
use crate::model::{Model, ModelError};
use rayon::prelude::*;
use serde::Deserialize;
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EstimatorError {
    #[error("{context} needs at least {needed} replications, got {got}")]
    InsufficientSample {
        context: &'static str,
        needed: usize,
        got: usize,
    },
    #[error("truncation order must be at least 2, got {0}")]
    TruncationOrder(u32),
    #[error("initial capital must be nonnegative and finite, got {0}")]
    InvalidCapital(f64),
    #[error("control batch malformed: {0}")]
    MalformedBatch(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Which series expansion the estimator targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Series {
    /// Discard series around the phase-type base model.
    New,
    /// Classical Pollaczek–Khinchine series.
    Pk,
}

/// Estimation method within a series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Method {
    Crude,
    CvMax,
    Ak,
    AkCv,
}

/// One of the estimator variants, ordered series-major for stable output.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Deserialize)]
#[serde(try_from = "String")]
pub struct EstimatorKind {
    pub series: Series,
    pub method: Method,
}

impl EstimatorKind {
    pub const ALL: [EstimatorKind; 8] = [
        EstimatorKind { series: Series::New, method: Method::Crude },
        EstimatorKind { series: Series::New, method: Method::CvMax },
        EstimatorKind { series: Series::New, method: Method::Ak },
        EstimatorKind { series: Series::New, method: Method::AkCv },
        EstimatorKind { series: Series::Pk, method: Method::Crude },
        EstimatorKind { series: Series::Pk, method: Method::CvMax },
        EstimatorKind { series: Series::Pk, method: Method::Ak },
        EstimatorKind { series: Series::Pk, method: Method::AkCv },
    ];
}

impl fmt::Display for Series {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Series::New => "new",
            Series::Pk => "pk",
        })
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Crude => "crude",
            Method::CvMax => "cv_max",
            Method::Ak => "ak",
            Method::AkCv => "ak_cv",
        })
    }
}

impl fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.series, self.method)
    }
}

impl FromStr for EstimatorKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (series, method) = s
            .split_once(':')
            .ok_or_else(|| format!("expected <series>:<method>, got {s:?}"))?;
        let series = match series {
            "new" => Series::New,
            "pk" => Series::Pk,
            other => return Err(format!("unknown series {other:?} (expected new or pk)")),
        };
        let method = match method {
            "crude" => Method::Crude,
            "cv_max" => Method::CvMax,
            "ak" => Method::Ak,
            "ak_cv" => Method::AkCv,
            other => {
                return Err(format!(
                    "unknown method {other:?} (expected crude, cv_max, ak or ak_cv)"
                ))
            }
        };
        Ok(EstimatorKind { series, method })
    }
}

impl TryFrom<String> for EstimatorKind {
    type Error = String;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        value.parse()
    }
}

/// Paired control values with their exact mean.
#[derive(Debug, Clone)]
pub struct Control {
    pub z: Vec<f64>,
    pub expected: f64,
}

/// Per-replication target values, optionally paired with a control.
#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub y: Vec<f64>,
    pub control: Option<Control>,
}

/// Point estimate with its sampling error and control diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorResult {
    pub estimate: f64,
    pub std_err: f64,
    pub ci95: (f64, f64),
    /// Regression coefficient of the control; zero without a control.
    pub beta_hat: f64,
    /// Empirical correlation between target and control; zero without one.
    pub corr_hat: f64,
    pub reps: usize,
    pub kind: EstimatorKind,
}

impl EstimatorResult {
    fn from_stats(estimate: f64, variance_of_mean: f64, stats: ControlStats, reps: usize, kind: EstimatorKind) -> Self {
        let std_err = variance_of_mean.max(0.0).sqrt();
        Self {
            estimate,
            std_err,
            ci95: (estimate - 1.96 * std_err, estimate + 1.96 * std_err),
            beta_hat: stats.beta,
            corr_hat: stats.corr,
            reps,
            kind,
        }
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct ControlStats {
    beta: f64,
    corr: f64,
}

/// Regression control-variate combiner:
///
///   estimate = Ȳ + β̂(Z̄ - E[Z]),  β̂ = -Σ(Yᵢ-Ȳ)(Zᵢ-Z̄) / Σ(Zᵢ-Z̄)²,
///
/// with the standard error taken from the residual series Yᵢ + β̂(Zᵢ - E[Z]).
/// A control with zero sample variance degrades to the crude mean (β̂ = 0).
pub fn cv_combine(batch: &SampleBatch, kind: EstimatorKind) -> Result<EstimatorResult, EstimatorError> {
    let reps = batch.y.len();
    if reps == 0 {
        return Err(EstimatorError::InsufficientSample {
            context: "cv_combine",
            needed: 1,
            got: 0,
        });
    }
    let n = reps as f64;
    let y_bar = batch.y.iter().sum::<f64>() / n;
    let syy: f64 = batch.y.iter().map(|y| (y - y_bar) * (y - y_bar)).sum();

    let Some(control) = &batch.control else {
        let var_mean = if reps > 1 { syy / (n - 1.0) / n } else { 0.0 };
        return Ok(EstimatorResult::from_stats(
            y_bar,
            var_mean,
            ControlStats::default(),
            reps,
            kind,
        ));
    };

    if control.z.len() != reps {
        return Err(EstimatorError::MalformedBatch(format!(
            "control has {} values for {reps} replications",
            control.z.len()
        )));
    }
    if reps < 2 {
        return Err(EstimatorError::InsufficientSample {
            context: "control-variate estimation",
            needed: 2,
            got: reps,
        });
    }
    let z_bar = control.z.iter().sum::<f64>() / n;
    let mut szz = 0.0;
    let mut syz = 0.0;
    for (y, z) in batch.y.iter().zip(&control.z) {
        szz += (z - z_bar) * (z - z_bar);
        syz += (y - y_bar) * (z - z_bar);
    }

    if szz == 0.0 {
        // Degenerate control: fall back to the crude mean.
        let var_mean = syy / (n - 1.0) / n;
        return Ok(EstimatorResult::from_stats(
            y_bar,
            var_mean,
            ControlStats::default(),
            reps,
            kind,
        ));
    }

    let beta = -syz / szz;
    let corr = if syy > 0.0 {
        (syz / (syy * szz).sqrt()).clamp(-1.0, 1.0)
    } else {
        0.0
    };
    let estimate = y_bar + beta * (z_bar - control.expected);
    // Var of the residual series equals Var(Y)·(1 - corr²).
    let residual_ss = (syy - syz * syz / szz).max(0.0);
    let var_mean = residual_ss / (n - 1.0) / n;
    Ok(EstimatorResult::from_stats(
        estimate,
        var_mean,
        ControlStats { beta, corr },
        reps,
        kind,
    ))
}

fn check_capital(u: f64) -> Result<(), EstimatorError> {
    if !u.is_finite() || u < 0.0 {
        return Err(EstimatorError::InvalidCapital(u));
    }
    Ok(())
}

/// Runs `f` once per replication on the stream (seed, index), preserving
/// index order in the output.
fn replicate<T: Send>(
    reps: usize,
    seed: u64,
    f: impl Fn(&mut RngStream) -> T + Sync,
) -> Vec<T> {
    (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::substream(seed, i as u64);
            f(&mut rng)
        })
        .collect()
}

fn try_replicate<T: Send>(
    reps: usize,
    seed: u64,
    f: impl Fn(&mut RngStream) -> Result<T, EstimatorError> + Sync,
) -> Result<Vec<T>, EstimatorError> {
    (0..reps)
        .into_par_iter()
        .map(|i| {
            let mut rng = RngStream::substream(seed, i as u64);
            f(&mut rng)
        })
        .collect()
}

/// Crude estimator: Y = q²·1{V > u} (discard series) or ρ²·1{V° > u} (PK).
pub fn crude(
    series: Series,
    model: &Model,
    u: f64,
    reps: usize,
    seed: u64,
) -> Result<EstimatorResult, EstimatorError> {
    check_capital(u)?;
    if reps == 0 {
        return Err(EstimatorError::InsufficientSample {
            context: "crude",
            needed: 1,
            got: 0,
        });
    }
    let rates = model.rates();
    let y = match series {
        Series::New => {
            let weight = rates.q * rates.q;
            replicate(reps, seed, |rng| {
                if model.sample_v_new(rng).total > u {
                    weight
                } else {
                    0.0
                }
            })
        }
        Series::Pk => {
            let weight = rates.rho * rates.rho;
            replicate(reps, seed, |rng| {
                if model.sample_v_pk(rng).total > u {
                    weight
                } else {
                    0.0
                }
            })
        }
    };
    cv_combine(
        &SampleBatch { y, control: None },
        EstimatorKind {
            series,
            method: Method::Crude,
        },
    )
}

pub(crate) fn cv_max_batch(
    series: Series,
    model: &Model,
    u: f64,
    n: u32,
    reps: usize,
    seed: u64,
) -> Result<SampleBatch, EstimatorError> {
    check_capital(u)?;
    if n < 2 {
        return Err(EstimatorError::TruncationOrder(n));
    }
    if reps < 2 {
        return Err(EstimatorError::InsufficientSample {
            context: "cv_max",
            needed: 2,
            got: reps,
        });
    }
    let rates = model.rates();
    let expected = analysis::z_n(series, model, u, n);
    let pairs: Vec<(f64, f64)> = match series {
        Series::New => {
            let weight = rates.q * rates.q;
            replicate(reps, seed, |rng| {
                let draw = model.sample_v_new(rng);
                let y = if draw.total > u { weight } else { 0.0 };
                let w = if draw.heavy_max > u && draw.count + 2 <= n as u64 {
                    weight
                } else {
                    0.0
                };
                debug_assert!(w <= y, "control event must imply the target event");
                (y, w)
            })
        }
        Series::Pk => {
            let weight = rates.rho * rates.rho;
            replicate(reps, seed, |rng| {
                let draw = model.sample_v_pk(rng);
                let y = if draw.total > u { weight } else { 0.0 };
                let w = if draw.ce_max > u && draw.count + 2 <= n as u64 {
                    weight
                } else {
                    0.0
                };
                debug_assert!(w <= y);
                (y, w)
            })
        }
    };
    let (y, z): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    Ok(SampleBatch {
        y,
        control: Some(Control { z, expected }),
    })
}

/// Control-variate estimator of order n: the control is the indicator that
/// the maximum heavy excess term alone exceeds u with at most n summands,
/// whose exact mean is z_n(u).
pub fn cv_max(
    series: Series,
    model: &Model,
    u: f64,
    n: u32,
    reps: usize,
    seed: u64,
) -> Result<EstimatorResult, EstimatorError> {
    let batch = cv_max_batch(series, model, u, n, reps, seed)?;
    cv_combine(
        &batch,
        EstimatorKind {
            series,
            method: Method::CvMax,
        },
    )
}

/// Conditional kernel for the discard series with the count pinned to `g`:
/// (g+2)·F̄_D(M ∨ (u - D₀ - S)) over g+1 drawn summands, where M and S are
/// the running maximum and sum of D₁..D_{g+1} and D₀ = M_d⁽⁰⁾. Its mean over
/// the draws is P(D₀ + D₁ + ... + D_{g+2} > u).
pub fn ak_kernel_new(
    model: &Model,
    u: f64,
    g: u64,
    rng: &mut RngStream,
) -> Result<f64, EstimatorError> {
    let d0 = model.sample_md(rng);
    let mut running_max = 0.0f64;
    let mut running_sum = 0.0f64;
    for _ in 0..g + 1 {
        let d = model.sample_d(rng);
        running_sum += d;
        running_max = running_max.max(d);
    }
    let arg = running_max.max(u - d0 - running_sum);
    Ok((g + 2) as f64 * model.ccdf_d(arg)?)
}

/// PK counterpart with the count pinned to `k`:
/// (k+2)·F̄_{C_e}(M° ∨ (u - S°)) over k+1 drawn excess claims.
pub fn ak_kernel_pk(model: &Model, u: f64, k: u64, rng: &mut RngStream) -> f64 {
    let mut running_max = 0.0f64;
    let mut running_sum = 0.0f64;
    for _ in 0..k + 1 {
        let c = model.mixture_excess().sample(rng);
        running_sum += c;
        running_max = running_max.max(c);
    }
    let arg = running_max.max(u - running_sum);
    (k + 2) as f64 * model.ccdf_ce(arg)
}

/// Asmussen–Kroese conditional estimator; with `with_count_cv` the number of
/// summands is regression-controlled through Z = q²(G+2)·F̄_D(u) whose exact
/// mean is q²(εη_H/(1-ρ) + 2)·F̄_D(u) (PK analogue with ρ, K, C_e).
pub fn ak(
    series: Series,
    model: &Model,
    u: f64,
    reps: usize,
    seed: u64,
    with_count_cv: bool,
) -> Result<EstimatorResult, EstimatorError> {
    check_capital(u)?;
    let needed = if with_count_cv { 2 } else { 1 };
    if reps < needed {
        return Err(EstimatorError::InsufficientSample {
            context: "ak",
            needed,
            got: reps,
        });
    }
    let rates = model.rates();
    let kind = EstimatorKind {
        series,
        method: if with_count_cv { Method::AkCv } else { Method::Ak },
    };
    let (pairs, expected) = match series {
        Series::New => {
            let weight = rates.q * rates.q;
            let tail_at_u = model.ccdf_d(u)?;
            let count = crate::dists::GeometricLaw::new(rates.r).expect("validated rates");
            let expected = weight * (rates.heavy_load / (1.0 - rates.rho) + 2.0) * tail_at_u;
            let pairs = try_replicate(reps, seed, |rng| {
                let g = count.sample(rng);
                let y = weight * ak_kernel_new(model, u, g, rng)?;
                debug_assert!(y <= weight * (g + 2) as f64 + 1e-12);
                let z = weight * (g + 2) as f64 * tail_at_u;
                Ok((y, z))
            })?;
            (pairs, expected)
        }
        Series::Pk => {
            let weight = rates.rho * rates.rho;
            let tail_at_u = model.ccdf_ce(u);
            let count = crate::dists::GeometricLaw::new(1.0 - rates.rho).expect("validated rates");
            let expected = weight * (rates.rho / (1.0 - rates.rho) + 2.0) * tail_at_u;
            let pairs = try_replicate(reps, seed, |rng| {
                let k = count.sample(rng);
                let y = weight * ak_kernel_pk(model, u, k, rng);
                let z = weight * (k + 2) as f64 * tail_at_u;
                Ok((y, z))
            })?;
            (pairs, expected)
        }
    };
    let (y, z): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
    let control = with_count_cv.then_some(Control { z, expected });
    cv_combine(&SampleBatch { y, control }, kind)
}

/// Dispatch on the estimator kind. `n` is only consulted by `cv_max`.
pub fn run_estimator(
    kind: EstimatorKind,
    model: &Model,
    u: f64,
    n: u32,
    reps: usize,
    seed: u64,
) -> Result<EstimatorResult, EstimatorError> {
    match kind.method {
        Method::Crude => crude(kind.series, model, u, reps, seed),
        Method::CvMax => cv_max(kind.series, model, u, n, reps, seed),
        Method::Ak => ak(kind.series, model, u, reps, seed, false),
        Method::AkCv => ak(kind.series, model, u, reps, seed, true),
    }
}

/// Adds the exact explicit part of the series to an estimate of the
/// remainder, turning R̂(u) into ψ̂(u). The standard error is untouched.
///
/// Discard series: ψ = r·ψ_d(u) + r·q·G₁(u) + R(u).
/// PK series:      ψ = (1-ρ)·ρ·F̄_{C_e}(u) + R°(u).
pub fn assemble_psi(
    model: &Model,
    u: f64,
    remainder: &EstimatorResult,
) -> Result<EstimatorResult, EstimatorError> {
    check_capital(u)?;
    let rates = model.rates();
    let explicit = match remainder.kind.series {
        Series::New => rates.r * (model.psi_d_exact(u) + rates.q * model.g1(u)?),
        Series::Pk => (1.0 - rates.rho) * rates.rho * model.ccdf_ce(u),
    };
    Ok(EstimatorResult {
        estimate: remainder.estimate + explicit,
        ci95: (remainder.ci95.0 + explicit, remainder.ci95.1 + explicit),
        ..*remainder
    })
}

/// The exact explicit part alone (exposed for reporting).
pub fn explicit_part(model: &Model, series: Series, u: f64) -> Result<f64, EstimatorError> {
    let rates = model.rates();
    Ok(match series {
        Series::New => rates.r * (model.psi_d_exact(u) + rates.q * model.g1(u)?),
        Series::Pk => (1.0 - rates.rho) * rates.rho * model.ccdf_ce(u),
    })
}
