//! Exponential integral Ei for positive arguments.
//!
//! Ei(x) = -PV ∫_{-x}^∞ e^{-t}/t dt. For x ≤ 40 the convergent power series
//!
//!   Ei(x) = γ + ln x + Σ_{k≥1} x^k / (k · k!)
//!
//! has only positive summands, so plain f64 accumulation is accurate. For
//! larger x the asymptotic expansion Ei(x) ~ e^x/x · Σ_{k≥0} k!/x^k is
//! truncated at its smallest term; past x = 40 that term is below f64
//! round-off, which keeps the result well inside the 1e-10 contract.
//!
//! The tail convolution formulas in this crate only ever need the product
//! e^{-y}·Ei(y), which stays bounded as y grows. [`expi_scaled`] computes it
//! directly so callers never go through an intermediate e^x that overflows.

use super::NumericsError;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_CUTOFF: f64 = 40.0;
// Largest x with Ei(x) representable in f64: x - ln x ≈ 709.78 at x ≈ 716.35.
const LN_F64_MAX: f64 = 709.782_712_893_384;

/// Exponential integral Ei(x) for x > 0, relative error below 1e-10.
pub fn expi(x: f64) -> Result<f64, NumericsError> {
    if !(x > 0.0) {
        return Err(NumericsError::Domain {
            context: "expi",
            detail: format!("argument must be positive, got {x}"),
        });
    }
    if x <= SERIES_CUTOFF {
        return Ok(series(x));
    }
    let scaled = asymptotic_scaled(x);
    let ln_value = x + scaled.ln();
    if ln_value >= LN_F64_MAX {
        return Err(NumericsError::Overflow {
            context: "expi",
            detail: format!("Ei({x}) exceeds f64 range; use expi_scaled"),
        });
    }
    if x < 700.0 {
        Ok(scaled * x.exp())
    } else {
        Ok(ln_value.exp())
    }
}

/// Scaled exponential integral e^{-x}·Ei(x) for x > 0. Never overflows.
pub fn expi_scaled(x: f64) -> Result<f64, NumericsError> {
    if !(x > 0.0) {
        return Err(NumericsError::Domain {
            context: "expi_scaled",
            detail: format!("argument must be positive, got {x}"),
        });
    }
    if x <= SERIES_CUTOFF {
        Ok(series(x) * (-x).exp())
    } else {
        Ok(asymptotic_scaled(x))
    }
}

fn series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0;
    for k in 1..=700 {
        term *= x / k as f64;
        let add = term / k as f64;
        sum += add;
        if add < f64::EPSILON * sum {
            break;
        }
    }
    EULER_GAMMA + x.ln() + sum
}

// e^{-x} Ei(x) via the divergent expansion (1/x) Σ k!/x^k, truncated at the
// smallest term. Valid here because the callers guarantee x > 40.
fn asymptotic_scaled(x: f64) -> f64 {
    let mut sum = 1.0;
    let mut term = 1.0;
    let mut k = 1.0;
    loop {
        let next = term * k / x;
        if next >= term {
            // Smallest term reached; truncating here is the optimum.
            break;
        }
        sum += next;
        if next < f64::EPSILON * sum {
            break;
        }
        term = next;
        k += 1.0;
    }
    sum / x
}
