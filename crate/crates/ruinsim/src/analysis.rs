//! Analytic layer: truncated series approximations z_n, error bounds, tail
//! asymptotics, and the asymptotic variance constants of the control-variate
//! estimators.

use crate::estimators::Series;
use crate::model::{Model, ModelError};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("truncation order must be at least 2, got {0}")]
    TruncationOrder(u32),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// nth order approximation of the series remainder.
///
/// Discard series: z_n(u) = r·Σ_{k=2}^n q^k (1 - F_{H_e}(u)^k), using
/// P(max of k excess draws > u) = 1 - F(u)^k. The PK analogue replaces
/// (q, r, H_e) by (ρ, 1-ρ, C_e). Nondecreasing in n and bounded by the
/// remainder it approximates; n = 1 gives the empty sum.
pub fn z_n(series: Series, model: &Model, u: f64, n: u32) -> f64 {
    let rates = model.rates();
    let (ratio, weight, cdf) = match series {
        Series::New => (rates.q, rates.r, model.heavy().excess_cdf(u)),
        Series::Pk => (rates.rho, 1.0 - rates.rho, 1.0 - model.ccdf_ce(u)),
    };
    if n < 2 {
        return 0.0;
    }
    let mut sum = 0.0;
    let mut ratio_pow = ratio * ratio;
    let mut cdf_pow = cdf * cdf;
    for _ in 2..=n {
        sum += ratio_pow * (1.0 - cdf_pow);
        ratio_pow *= ratio;
        cdf_pow *= cdf;
    }
    weight * sum
}

/// Bounds on the approximation error R(u) - z_n(u) of the discard series:
///
///   q^{n+1}·G₁(u)  ≤  R(u) - z_n(u)  ≤  q^{n+1} + (1-q)·Σ_{k=2}^n (q·F)^k
///
/// with F = F_{H_e}(u). Both collapse to q^{n+1} at u = 0.
pub fn error_bounds(model: &Model, u: f64, n: u32) -> Result<(f64, f64), AnalysisError> {
    if n < 2 {
        return Err(AnalysisError::TruncationOrder(n));
    }
    let q = model.rates().q;
    let cdf = model.heavy().excess_cdf(u);
    let q_pow = q.powi(n as i32 + 1);
    let lower = q_pow * model.g1(u)?;
    let qf = q * cdf;
    let geometric = if qf > 0.0 {
        qf * qf * (1.0 - qf.powi(n as i32 - 1)) / (1.0 - qf)
    } else {
        0.0
    };
    let upper = q_pow + (1.0 - q) * geometric;
    Ok((lower, upper))
}

/// The factor in (0,1) by which the n-th approximation undershoots the
/// heavy-tail asymptote: 1 - (n+1)q^n + n·q^{n+1}.
pub fn tail_factor(model: &Model, n: u32) -> f64 {
    let q = model.rates().q;
    let qn = q.powi(n as i32);
    1.0 - (n as f64 + 1.0) * qn + n as f64 * qn * q
}

/// Tail asymptote of the n-th approximation:
/// ψ⁽ⁿ⁾(u) ~ εη_H/(1-ρ) · tail_factor(n) · F̄_{H_e}(u).
pub fn psi_n_asymptote(model: &Model, u: f64, n: u32) -> f64 {
    heavy_tail_approx(model, u) * tail_factor(model, n)
}

/// Heavy-tail approximation of the exact ruin probability:
/// ψ(u) ~ εη_H/(1-ρ) · F̄_{H_e}(u). An asymptote, not a probability; it may
/// exceed one for small u.
pub fn heavy_tail_approx(model: &Model, u: f64) -> f64 {
    let rates = model.rates();
    rates.heavy_load / (1.0 - rates.rho) * model.heavy().excess_ccdf(u)
}

/// Asymptotic variance constants of the max control-variate estimators, all
/// in the large-u limit for fixed truncation order n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VarianceConstants {
    pub n: u32,
    /// Var(cv estimator)/Var(crude), discard series: q^{n-1}(1+n·r)/(1+r).
    pub ratio_new: f64,
    /// Same for the PK series: ρ^{n-1}(1+n(1-ρ))/(2-ρ).
    pub ratio_pk: f64,
    /// Var(cv new)/Var(cv PK): (q/ρ)^{n+2}·(1+n·r)/(1+n(1-ρ)).
    pub cross_cv: f64,
    /// Ratio of the two variance-reduction factors:
    /// (q/ρ)^{n-1}·(1+n·r)/(1+n(1-ρ))·(2-ρ)/(1+r).
    pub cross_raw: f64,
}

pub fn variance_constants(model: &Model, n: u32) -> VarianceConstants {
    let rates = model.rates();
    let (q, r, rho) = (rates.q, rates.r, rates.rho);
    let nf = n as f64;
    let ratio_new = q.powi(n as i32 - 1) * (1.0 + nf * r) / (1.0 + r);
    let ratio_pk = rho.powi(n as i32 - 1) * (1.0 + nf * (1.0 - rho)) / (2.0 - rho);
    let cross_cv = (q / rho).powi(n as i32 + 2) * (1.0 + nf * r) / (1.0 + nf * (1.0 - rho));
    let cross_raw = (q / rho).powi(n as i32 - 1) * (1.0 + nf * r) / (1.0 + nf * (1.0 - rho))
        * (2.0 - rho)
        / (1.0 + r);
    VarianceConstants {
        n,
        ratio_new,
        ratio_pk,
        cross_cv,
        cross_raw,
    }
}

/// Asymptotic variance of the discard-series cv estimator at capital u with
/// R replications: q^{n+3}·(1+n·r)/r·F̄_{H_e}(u)/R.
pub fn asym_var_new(model: &Model, n: u32, u: f64, reps: usize) -> f64 {
    let rates = model.rates();
    rates.q.powi(n as i32 + 3) * (1.0 + n as f64 * rates.r) / rates.r
        * model.heavy().excess_ccdf(u)
        / reps as f64
}

/// PK counterpart: ρ^{n+3}·(1+n(1-ρ))/(1-ρ)·(εη_H/ρ)·F̄_{H_e}(u)/R.
pub fn asym_var_pk(model: &Model, n: u32, u: f64, reps: usize) -> f64 {
    let rates = model.rates();
    let one_minus = 1.0 - rates.rho;
    rates.rho.powi(n as i32 + 3) * (1.0 + n as f64 * one_minus) / one_minus
        * (rates.heavy_load / rates.rho)
        * model.heavy().excess_ccdf(u)
        / reps as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{Load, Model, ModelParams};

    fn reference_model() -> Model {
        let params =
            ModelParams::exp_pareto(3.0, 2.0, 1.0, 0.1, Load::TrafficIntensity(0.99)).unwrap();
        Model::new(params).unwrap()
    }

    fn model_with(epsilon: f64, rho: f64) -> Model {
        let params =
            ModelParams::exp_pareto(3.0, 2.0, 1.0, epsilon, Load::TrafficIntensity(rho)).unwrap();
        Model::new(params).unwrap()
    }

    #[test]
    fn z_n_empty_sum_and_u_zero_geometric_form() {
        let m = reference_model();
        assert_eq!(z_n(Series::New, &m, 5.0, 1), 0.0);
        // At u = 0 the excess cdf vanishes: z_n(0) = q²(1 - q^{n-1}).
        let q = m.rates().q;
        for n in [2u32, 5, 20, 100] {
            let want = q * q * (1.0 - q.powi(n as i32 - 1));
            let got = z_n(Series::New, &m, 0.0, n);
            assert!((got - want).abs() < 1e-12, "n={n}: {got} vs {want}");
        }
        // Frozen value at n = 100.
        assert!((z_n(Series::New, &m, 0.0, 100) - 0.9055321872686603).abs() < 1e-12);
        // n → ∞ limit is q² = R(0).
        assert!((z_n(Series::New, &m, 0.0, 5000) - q * q).abs() < 1e-12);
    }

    #[test]
    fn z_n_monotone_in_n_both_series() {
        let m = reference_model();
        for series in [Series::New, Series::Pk] {
            for u in [0.0, 1.0, 50.0] {
                let mut prev = -1.0;
                for n in 1..=200 {
                    let v = z_n(series, &m, u, n);
                    assert!(v >= prev - 1e-15, "series {series:?} u={u} n={n}");
                    prev = v;
                }
            }
        }
    }

    #[test]
    fn error_bounds_collapse_at_zero() {
        let m = reference_model();
        let q = m.rates().q;
        for n in [2u32, 10, 100] {
            let (lo, hi) = error_bounds(&m, 0.0, n).unwrap();
            let q_pow = q.powi(n as i32 + 1);
            assert!((lo - q_pow).abs() < 1e-12, "n={n}");
            assert!((hi - q_pow).abs() < 1e-15, "n={n}");
            // z_n(0) + q^{n+1} = q² exactly.
            let total = z_n(Series::New, &m, 0.0, n) + q_pow;
            assert!((total - q * q).abs() < 1e-12, "n={n}: {total}");
        }
    }

    #[test]
    fn error_bounds_shrink_and_validate() {
        let m = reference_model();
        let (lo1, hi1) = error_bounds(&m, 1.0, 50).unwrap();
        let (lo2, hi2) = error_bounds(&m, 1.0, 400).unwrap();
        assert!(lo1 <= hi1 && lo2 <= hi2);
        assert!(hi2 < hi1 && lo2 < lo1);
        // The lower bound vanishes with n; the upper bound decreases to the
        // geometric-series limit (1-q)·Σ_{k≥2}(qF)^k, which stays positive
        // because the max event never exhausts the sum event.
        assert!(lo2 < 1e-6);
        let q = m.rates().q;
        let qf = q * m.heavy().excess_cdf(1.0);
        let limit = (1.0 - q) * qf * qf / (1.0 - qf);
        assert!((hi2 - limit).abs() < 1e-6, "hi {hi2} vs limit {limit}");
        assert!(matches!(
            error_bounds(&m, 1.0, 1),
            Err(AnalysisError::TruncationOrder(1))
        ));
    }

    #[test]
    fn tail_factor_reference_value_and_monotonicity() {
        let m = reference_model();
        // Formula oracle at n = 100: 1 - 101 q^100 + 100 q^101.
        let q: f64 = m.rates().q;
        let direct = 1.0 - 101.0 * q.powi(100) + 100.0 * q.powi(101);
        let got = tail_factor(&m, 100);
        assert!((got - direct).abs() < 1e-14);
        assert!((got - 0.9069904057930688).abs() < 1e-12);

        for model in [reference_model(), model_with(0.7, 0.9)] {
            let mut prev = 0.0;
            for n in 1..=200 {
                let f = tail_factor(&model, n);
                assert!(f > 0.0 && f < 1.0, "factor {f} outside (0,1) at n={n}");
                assert!(f > prev, "not increasing at n={n}");
                prev = f;
            }
        }
        assert!((tail_factor(&m, 5000) - 1.0).abs() < 1e-10);
    }

    #[test]
    fn heavy_tail_approx_reference_values() {
        let m = reference_model();
        // 24.75/(1+u) at the reference parameters.
        assert!((heavy_tail_approx(&m, 0.0) - 24.75).abs() < 1e-12);
        assert!((heavy_tail_approx(&m, 1e4) - 2.474752524747525e-3).abs() < 1e-15);
        let u = 100.0;
        let want = 24.75 / (1.0 + u);
        assert!((heavy_tail_approx(&m, u) - want).abs() < 1e-12);
        // Asymptote of the n-th approximation is the factor times it.
        let v = psi_n_asymptote(&m, u, 100);
        assert!((v - want * 0.9069904057930688).abs() < 1e-10);
    }

    #[test]
    fn variance_constants_reference_values() {
        // Formula oracle evaluated independently, matching the reported
        // two-decimal constants 0.09 / 0.73 / 0.12.
        let m = reference_model();
        let c = variance_constants(&m, 100);
        assert!((c.ratio_new - 0.09315007882010134).abs() < 1e-12);
        assert!((c.ratio_pk - 0.7321378963360926).abs() < 1e-12);
        assert!((c.cross_cv - 0.1197578097944646).abs() < 1e-12);
        assert!((c.cross_raw - 0.1272302380279195).abs() < 1e-12);
        assert_eq!((c.ratio_new * 100.0).round() / 100.0, 0.09);
        assert_eq!((c.ratio_pk * 100.0).round() / 100.0, 0.73);
        assert_eq!((c.cross_cv * 100.0).round() / 100.0, 0.12);
    }

    #[test]
    fn variance_constants_small_orders() {
        let m = reference_model();
        let r = m.rates().r;
        let q = m.rates().q;
        let c1 = variance_constants(&m, 1);
        assert!((c1.ratio_new - 1.0).abs() < 1e-12, "no reduction at n=1");
        let c2 = variance_constants(&m, 2);
        let want = q * (1.0 + 2.0 * r) / (1.0 + r);
        assert!((c2.ratio_new - want).abs() < 1e-12);
    }

    #[test]
    fn new_series_beats_pk_for_all_orders() {
        for (eps, rho) in [(0.1, 0.99), (0.7, 0.9), (0.3, 0.5), (0.05, 0.8)] {
            let m = model_with(eps, rho);
            for n in 2..=120 {
                let c = variance_constants(&m, n);
                assert!(
                    c.ratio_new < c.ratio_pk,
                    "eps={eps} rho={rho} n={n}: {} !< {}",
                    c.ratio_new,
                    c.ratio_pk
                );
            }
        }
    }

    #[test]
    fn cross_cv_decays_in_n() {
        let m = reference_model();
        let mut prev = f64::INFINITY;
        for n in 5..=500 {
            let c = variance_constants(&m, n);
            assert!(c.cross_cv < prev, "cross_cv not decreasing at n={n}");
            prev = c.cross_cv;
        }
        assert!(variance_constants(&m, 500).cross_cv < 1e-4);
    }

    #[test]
    fn smaller_heavy_share_widens_the_advantage() {
        // cross_cv at fixed n = 100 increases with epsilon at fixed rho.
        let mut prev = 0.0;
        for eps in [0.05, 0.1, 0.3, 0.7] {
            let c = variance_constants(&model_with(eps, 0.99), 100);
            assert!(
                c.cross_cv > prev,
                "cross_cv not increasing at eps={eps}: {} vs {prev}",
                c.cross_cv
            );
            prev = c.cross_cv;
        }
    }

    #[test]
    fn asymptotic_variances_positive_and_scaling() {
        let m = reference_model();
        let v1 = asym_var_new(&m, 100, 1e4, 10_000);
        let v2 = asym_var_new(&m, 100, 1e4, 20_000);
        assert!(v1 > 0.0);
        assert!((v1 / v2 - 2.0).abs() < 1e-12, "1/R scaling");
        let ratio = v1 / asym_var_pk(&m, 100, 1e4, 10_000);
        let c = variance_constants(&m, 100);
        assert!(
            (ratio - c.cross_cv).abs() < 1e-12,
            "asymptotic variances consistent with cross_cv"
        );
    }
}
