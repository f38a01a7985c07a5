//! Closed forms for the convolution tails F̄_D(u) = P(M + H_e > u) and
//! G₁(u) = P(M⁰ + M¹ + H_e > u) when the light component is exponential and
//! the heavy component is a shifted Pareto with integer shape.
//!
//! With γ the ladder decay rate and s = a - 1, both tails reduce to the
//! antiderivatives J_s(z) = ∫ e^z z^{-s} dz, which satisfy J_1 = Ei and
//!
//!   J_s(z) = -e^z / ((s-1) z^{s-1}) + J_{s-1}(z) / (s-1).
//!
//! Every occurrence of Ei is paired with a factor that keeps e^{-y}·Ei(y)
//! together, so the evaluation never forms an intermediate e^y.

use crate::dists::{HeavyClaim, PhaseType, ShiftedPareto};
use crate::numerics::expi_scaled;

const INTEGER_SHAPE_TOL: f64 = 1e-9;

/// Exponential-light / integer-shape-Pareto closed form.
#[derive(Debug, Clone)]
pub(crate) struct ExpParetoClosedForm {
    s: usize,
    gamma: f64,
    z1: f64,
    rho_d: f64,
    pareto: ShiftedPareto,
    /// e^{-z1}·Ei(z1), shared by every evaluation.
    scaled_ei_z1: f64,
    /// Ei coefficients c_k = 1/(k-1)! of J_k, index 1..=s.
    ei_coeff: Vec<f64>,
    /// Rational parts P_k of J_k as (power of 1/z, coefficient) lists.
    rational: Vec<Vec<(i32, f64)>>,
}

impl ExpParetoClosedForm {
    /// Available exactly when the light component is exponential and the
    /// Pareto shape is an integer at least 2.
    pub fn detect(light: &PhaseType, heavy: &HeavyClaim, rho_d: f64) -> Option<Self> {
        if light.order() != 1 {
            return None;
        }
        let pareto = *heavy.as_pareto()?;
        let shape = pareto.shape();
        let rounded = shape.round();
        if (shape - rounded).abs() > INTEGER_SHAPE_TOL || rounded < 2.0 {
            return None;
        }
        let s = (rounded as usize) - 1;
        let mu = -light.sub_intensity().get(0, 0);
        let gamma = mu * (1.0 - rho_d);
        let z1 = gamma * pareto.scale();

        // Build J_k = c_k·Ei - e^z·P_k(1/z) for k = 1..=s.
        let mut ei_coeff = vec![0.0; s + 1];
        let mut rational: Vec<Vec<(i32, f64)>> = vec![Vec::new(); s + 1];
        if s >= 1 {
            ei_coeff[1] = 1.0;
        }
        for k in 2..=s {
            let div = (k - 1) as f64;
            ei_coeff[k] = ei_coeff[k - 1] / div;
            let mut poly: Vec<(i32, f64)> = rational[k - 1]
                .iter()
                .map(|(m, c)| (*m, c / div))
                .collect();
            poly.push(((k - 1) as i32, 1.0 / div));
            rational[k] = poly;
        }

        Some(Self {
            s,
            gamma,
            z1,
            rho_d,
            pareto,
            scaled_ei_z1: expi_scaled(z1).expect("z1 > 0"),
            ei_coeff,
            rational,
        })
    }

    fn eval_rational(&self, order: usize, z: f64) -> f64 {
        self.rational[order]
            .iter()
            .map(|(m, c)| c * z.powi(-m))
            .sum()
    }

    /// K_k = e^{-z2}·(J_k(z2) - J_k(z1)) with z2 = z1 + γu.
    fn k_term(&self, order: usize, z2: f64, exp_neg_gu: f64) -> f64 {
        if order == 0 {
            // J_0 = e^z
            return 1.0 - exp_neg_gu;
        }
        let ei_part = self.ei_coeff[order]
            * (expi_scaled(z2).expect("z2 > 0") - exp_neg_gu * self.scaled_ei_z1);
        let rational_part =
            self.eval_rational(order, z2) - exp_neg_gu * self.eval_rational(order, self.z1);
        ei_part - rational_part
    }

    /// P(M + H_e > u).
    pub fn ccdf_d(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 1.0;
        }
        let z2 = self.z1 + self.gamma * u;
        let exp_neg_gu = (-self.gamma * u).exp();
        let k_s = self.k_term(self.s, z2, exp_neg_gu);
        (1.0 - self.rho_d) * self.pareto.excess_ccdf(u)
            + self.rho_d * exp_neg_gu
            + self.rho_d * self.z1.powi(self.s as i32) * k_s
    }

    /// P(M⁰ + M¹ + H_e > u).
    pub fn g1(&self, u: f64) -> f64 {
        if u <= 0.0 {
            return 1.0;
        }
        let z2 = self.z1 + self.gamma * u;
        let exp_neg_gu = (-self.gamma * u).exp();
        let k_s = self.k_term(self.s, z2, exp_neg_gu);
        let k_prev = self.k_term(self.s - 1, z2, exp_neg_gu);
        let rho_d = self.rho_d;
        let atom_free = 1.0 - rho_d;
        let gu = self.gamma * u;

        atom_free * atom_free * self.pareto.excess_ccdf(u)
            + rho_d * exp_neg_gu * (2.0 * atom_free + rho_d * (1.0 + gu))
            + rho_d
                * self.z1.powi(self.s as i32)
                * ((2.0 * atom_free + rho_d * (gu + self.z1)) * k_s - rho_d * k_prev)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn section4_form() -> ExpParetoClosedForm {
        let light = PhaseType::exponential(3.0).unwrap();
        let heavy = HeavyClaim::pareto(2.0, 1.0).unwrap();
        ExpParetoClosedForm::detect(&light, &heavy, 0.7425).expect("closed form applies")
    }

    #[test]
    fn detection_rules() {
        let light = PhaseType::exponential(3.0).unwrap();
        let erlang = PhaseType::erlang(2, 1.0).unwrap();
        let pareto2 = HeavyClaim::pareto(2.0, 1.0).unwrap();
        let pareto25 = HeavyClaim::pareto(2.5, 1.0).unwrap();
        let ph_heavy = HeavyClaim::phase_type(PhaseType::exponential(1.0).unwrap());
        assert!(ExpParetoClosedForm::detect(&light, &pareto2, 0.5).is_some());
        assert!(ExpParetoClosedForm::detect(&erlang, &pareto2, 0.5).is_none());
        assert!(ExpParetoClosedForm::detect(&light, &pareto25, 0.5).is_none());
        assert!(ExpParetoClosedForm::detect(&light, &ph_heavy, 0.5).is_none());
    }

    #[test]
    fn normalizes_at_zero() {
        let cf = section4_form();
        assert_eq!(cf.ccdf_d(0.0), 1.0);
        assert_eq!(cf.g1(0.0), 1.0);
    }

    #[test]
    fn matches_reference_values() {
        // High-precision evaluations of the printed convolution tails at the
        // reference parameters mu=3, a=2, b=1, eps=0.1, rho=0.99.
        let cf = section4_form();
        let ccdf_cases = [
            (0.5, 0.86669593867541474),
            (1.0, 0.73671154253483863),
            (5.0, 0.22281489141354177),
            (10.0, 0.10230677989801777),
            (100.0, 0.0099977259573199242),
        ];
        for (u, want) in ccdf_cases {
            let got = cf.ccdf_d(u);
            assert!((got - want).abs() < 1e-13, "ccdf_d({u}) = {got}, want {want}");
        }
        let g1_cases = [
            (0.5, 0.94891186221305516),
            (1.0, 0.872424564743657),
            (5.0, 0.30851795980378442),
            (10.0, 0.11881614107269974),
            (100.0, 0.010096404670725171),
        ];
        for (u, want) in g1_cases {
            let got = cf.g1(u);
            assert!((got - want).abs() < 1e-13, "g1({u}) = {got}, want {want}");
        }
    }

    #[test]
    fn tail_equivalent_to_heavy_excess() {
        // (1+u)·tail → 1 as u → ∞ for a = 2, b = 1.
        let cf = section4_form();
        let u = 1e6;
        assert!(((1.0 + u) * cf.ccdf_d(u) - 1.0).abs() < 1e-2);
        assert!(((1.0 + u) * cf.g1(u) - 1.0).abs() < 1e-2);
    }

    #[test]
    fn integer_shape_three_stays_finite_and_monotone() {
        let light = PhaseType::exponential(3.0).unwrap();
        let heavy = HeavyClaim::pareto(3.0, 1.0).unwrap();
        let cf = ExpParetoClosedForm::detect(&light, &heavy, 0.6).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let u = i as f64 * 0.5;
            let v = cf.ccdf_d(u);
            assert!(v.is_finite() && v >= 0.0);
            assert!(v <= prev + 1e-12);
            prev = v;
        }
    }
}
