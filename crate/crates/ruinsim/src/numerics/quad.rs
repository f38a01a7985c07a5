//! Adaptive Gauss–Kronrod quadrature and the generic compound tail
//! P(X + B > u) for X with an atom at zero plus a density.

use super::NumericsError;
use std::cmp::Ordering;
use std::collections::BinaryHeap;

/// Tolerances for the adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-9,
            rel_tol: 1e-9,
            max_subdivisions: 200,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<(), NumericsError> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(NumericsError::Domain {
                context: "QuadratureSpec",
                detail: "tolerances must be positive".into(),
            });
        }
        Ok(())
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule on [-1, 1].
const XGK: [f64; 8] = [
    0.991455371120813,
    0.949107912342759,
    0.864864423359769,
    0.741531185599394,
    0.586087235467691,
    0.405845151377397,
    0.207784955007898,
    0.0,
];
const WGK: [f64; 8] = [
    0.022935322010529,
    0.063092092629979,
    0.104790010322250,
    0.140653259715525,
    0.169004726639267,
    0.190350578064785,
    0.204432940075298,
    0.209482141084728,
];
const WG: [f64; 4] = [
    0.129484966168870,
    0.279705391489277,
    0.381830050505119,
    0.417959183673469,
];

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let f_mid = f(mid);
    let mut kronrod = WGK[7] * f_mid;
    let mut gauss = WG[3] * f_mid;
    for (i, (&x, &wk)) in XGK.iter().zip(&WGK).enumerate().take(7) {
        let lo = f(mid - half * x);
        let hi = f(mid + half * x);
        kronrod += wk * (lo + hi);
        if i % 2 == 1 {
            gauss += WG[i / 2] * (lo + hi);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    (value, error)
}

#[derive(Debug)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .partial_cmp(&other.error)
            .unwrap_or(Ordering::Equal)
    }
}

/// Integrates `f` over [a, b], splitting the worst segment until the summed
/// error estimate meets the tolerance.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, NumericsError> {
    spec.validate()?;
    if a == b {
        return Ok(0.0);
    }
    let mut heap = BinaryHeap::new();
    let (value, error) = gauss_kronrod(&f, a, b);
    let mut total_value = value;
    let mut total_error = error;
    heap.push(Segment {
        a,
        b,
        value,
        error,
    });
    let mut subdivisions = 0;
    loop {
        let tolerance = spec.abs_tol.max(spec.rel_tol * total_value.abs());
        if total_error <= tolerance {
            return Ok(total_value);
        }
        if subdivisions >= spec.max_subdivisions {
            return Err(NumericsError::QuadratureConvergence {
                max_subdivisions: spec.max_subdivisions,
                error: total_error,
                tolerance,
            });
        }
        let worst = heap.pop().expect("heap cannot be empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Interval at f64 resolution, cannot refine further.
            return Err(NumericsError::QuadratureConvergence {
                max_subdivisions: spec.max_subdivisions,
                error: total_error,
                tolerance,
            });
        }
        let left = gauss_kronrod(&f, worst.a, mid);
        let right = gauss_kronrod(&f, mid, worst.b);
        total_value += left.0 + right.0 - worst.value;
        total_error += left.1 + right.1 - worst.error;
        heap.push(Segment {
            a: worst.a,
            b: mid,
            value: left.0,
            error: left.1,
        });
        heap.push(Segment {
            a: mid,
            b: worst.b,
            value: right.0,
            error: right.1,
        });
        subdivisions += 1;
    }
}

/// Tail of a sum X + B where X has mass `atom0` at zero plus a density on
/// (0, ∞), and B > 0 almost surely with tail `tail_b`:
///
///   P(X + B > u) = atom0·tail_b(u) + ∫₀ᵘ density(x)·tail_b(u-x) dx + P(X > u).
///
/// `ccdf_x` supplies P(X > x). The integral is split at u/2 so the adaptive
/// rule does not straddle the midpoint kink that convolutions of short- and
/// long-tailed factors tend to develop.
pub fn tail_of_sum(
    atom0: f64,
    density: impl Fn(f64) -> f64,
    ccdf_x: impl Fn(f64) -> f64,
    tail_b: impl Fn(f64) -> f64,
    u: f64,
    spec: &QuadratureSpec,
) -> Result<f64, NumericsError> {
    if !(0.0..=1.0).contains(&atom0) {
        return Err(NumericsError::Domain {
            context: "tail_of_sum",
            detail: format!("atom0 must lie in [0,1], got {atom0}"),
        });
    }
    if !(u >= 0.0) {
        return Err(NumericsError::Domain {
            context: "tail_of_sum",
            detail: format!("u must be nonnegative, got {u}"),
        });
    }
    if u == 0.0 {
        return Ok(atom0 * tail_b(0.0) + ccdf_x(0.0));
    }
    let integrand = |x: f64| density(x) * tail_b(u - x);
    let mid = 0.5 * u;
    let convolution = integrate(&integrand, 0.0, mid, spec)? + integrate(&integrand, mid, u, spec)?;
    Ok(atom0 * tail_b(u) + convolution + ccdf_x(u))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_smooth_functions() {
        let spec = QuadratureSpec::default();
        let v = integrate(|x: f64| x.exp(), 0.0, 1.0, &spec).unwrap();
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-12);
        let v = integrate(|x: f64| (1.0 + x).powi(-2), 0.0, 9.0, &spec).unwrap();
        assert!((v - 0.9).abs() < 1e-12);
    }

    #[test]
    fn reports_nonconvergence() {
        let spec = QuadratureSpec {
            abs_tol: 1e-14,
            rel_tol: 1e-14,
            max_subdivisions: 3,
        };
        // Near-singular integrand cannot be resolved in three splits.
        let r = integrate(|x: f64| (x + 1e-12).powf(-0.5), 0.0, 1.0, &spec);
        assert!(matches!(
            r,
            Err(NumericsError::QuadratureConvergence { .. })
        ));
    }

    #[test]
    fn tail_of_sum_degenerate_cases() {
        let spec = QuadratureSpec::default();
        let tail_b = |x: f64| (1.0 + x).powi(-1);
        // u = 0 with B > 0 a.s. gives probability one.
        let v = tail_of_sum(0.3, |_| 0.0, |_| 0.7, tail_b, 0.0, &spec).unwrap();
        assert_eq!(v, 1.0);
        // X identically zero reduces to the tail of B.
        for u in [0.5, 2.0, 9.0] {
            let v = tail_of_sum(1.0, |_| 0.0, |_| 0.0, tail_b, u, &spec).unwrap();
            assert!((v - tail_b(u)).abs() < 1e-12);
        }
    }

    #[test]
    fn tail_of_sum_exponential_pair_matches_closed_form() {
        // X ~ Exp(1) (no atom), B ~ Exp(2):
        // P(X+B > u) = 2 e^{-u} - e^{-2u}.
        let spec = QuadratureSpec::default();
        for u in [0.1, 1.0, 4.0] {
            let v = tail_of_sum(
                0.0,
                |x: f64| (-x).exp(),
                |x: f64| (-x).exp(),
                |x: f64| (-2.0 * x).exp(),
                u,
                &spec,
            )
            .unwrap();
            let want = 2.0 * (-u).exp() - (-2.0 * u).exp();
            assert!((v - want).abs() < 1e-9, "u={u}: {v} vs {want}");
        }
    }

    #[test]
    fn tail_of_sum_nonincreasing_in_u() {
        let spec = QuadratureSpec::default();
        let mut prev = f64::INFINITY;
        for i in 0..40 {
            let u = i as f64 * 0.5;
            let v = tail_of_sum(
                0.25,
                |x: f64| 0.75 * 0.9 * (-0.9 * x).exp(),
                |x: f64| 0.75 * (-0.9 * x).exp(),
                |x: f64| (1.0 + x).powi(-1),
                u,
                &spec,
            )
            .unwrap();
            assert!(v <= prev + 1e-12, "not monotone at u={u}");
            prev = v;
        }
    }

    #[test]
    fn rejects_bad_arguments() {
        let spec = QuadratureSpec::default();
        assert!(tail_of_sum(1.5, |_| 0.0, |_| 0.0, |_| 1.0, 1.0, &spec).is_err());
        assert!(tail_of_sum(0.5, |_| 0.0, |_| 0.0, |_| 1.0, -1.0, &spec).is_err());
        let bad = QuadratureSpec {
            abs_tol: 0.0,
            ..QuadratureSpec::default()
        };
        assert!(integrate(|x| x, 0.0, 1.0, &bad).is_err());
    }
}
