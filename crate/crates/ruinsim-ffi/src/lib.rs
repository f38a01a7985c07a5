//! C ABI for the ruinsim engine.
//!
//! Models are opaque handles created by the `ruinsim_model_new_*` functions
//! and released with [`ruinsim_model_free`]. Every fallible call returns a
//! [`RuinsimStatus`]; outputs are written through pointers only on
//! `RUINSIM_STATUS_OK`. The generated header lives at `include/ruinsim.h`.

use ruinsim::estimators::{self, EstimatorKind, Method, Series};
use ruinsim::model::{Load, Model, ModelParams};
use std::os::raw::c_char;

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuinsimStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// A parameter failed validation (net profit, epsilon range, shapes).
    InvalidArgument = 2,
    /// A numerical routine failed (quadrature non-convergence, overflow).
    NumericalError = 3,
    /// Not enough replications for the requested estimator.
    InsufficientSample = 4,
}

/// Series selector matching the estimator taxonomy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuinsimSeries {
    New = 0,
    Pk = 1,
}

/// Method selector matching the estimator taxonomy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuinsimMethod {
    Crude = 0,
    CvMax = 1,
    Ak = 2,
    AkCv = 3,
}

/// Derived traffic intensities of a model.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RuinsimRates {
    pub lambda: f64,
    pub rho: f64,
    pub rho_d: f64,
    /// Heavy load ε·η_H.
    pub heavy_load: f64,
    /// Series ratio q = εη_H/(1-ρ_d).
    pub q: f64,
    /// Geometric success r = 1-q.
    pub r: f64,
}

/// Estimation output: the series remainder, the assembled ruin probability,
/// and the sampling diagnostics.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RuinsimEstimate {
    pub remainder: f64,
    pub psi_hat: f64,
    pub std_err: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub beta_hat: f64,
    pub corr_hat: f64,
    pub reps: u64,
}

/// Asymptotic variance-reduction constants at one truncation order.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RuinsimVarianceConstants {
    pub ratio_new: f64,
    pub ratio_pk: f64,
    pub cross_cv: f64,
    pub cross_raw: f64,
}

/// Opaque model handle.
pub struct RuinsimModel {
    inner: Model,
}

fn build_model(
    mu: f64,
    a: f64,
    b: f64,
    epsilon: f64,
    load: Load,
    out: *mut *mut RuinsimModel,
) -> RuinsimStatus {
    if out.is_null() {
        return RuinsimStatus::NullArgument;
    }
    let params = match ModelParams::exp_pareto(mu, a, b, epsilon, load) {
        Ok(p) => p,
        Err(_) => return RuinsimStatus::InvalidArgument,
    };
    match Model::new(params) {
        Ok(inner) => {
            let boxed = Box::new(RuinsimModel { inner });
            // SAFETY: `out` checked non-null above; caller owns the handle.
            unsafe { *out = Box::into_raw(boxed) };
            RuinsimStatus::Ok
        }
        Err(_) => RuinsimStatus::InvalidArgument,
    }
}

/// Creates an exponential-light / shifted-Pareto model with target traffic
/// intensity `rho`. On success writes a handle that must be released with
/// [`ruinsim_model_free`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn ruinsim_model_new_exp_pareto(
    mu: f64,
    a: f64,
    b: f64,
    epsilon: f64,
    rho: f64,
    out: *mut *mut RuinsimModel,
) -> RuinsimStatus {
    build_model(mu, a, b, epsilon, Load::TrafficIntensity(rho), out)
}

/// Same as [`ruinsim_model_new_exp_pareto`] but parameterized by the Poisson
/// arrival rate instead of the traffic intensity.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn ruinsim_model_new_exp_pareto_arrival(
    mu: f64,
    a: f64,
    b: f64,
    epsilon: f64,
    lambda: f64,
    out: *mut *mut RuinsimModel,
) -> RuinsimStatus {
    build_model(mu, a, b, epsilon, Load::Arrival(lambda), out)
}

/// Releases a model handle. Null is accepted and ignored.
///
/// # Safety
/// `model` must be null or a pointer returned by a `ruinsim_model_new_*`
/// function that has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn ruinsim_model_free(model: *mut RuinsimModel) {
    if !model.is_null() {
        // SAFETY: per contract the pointer came from Box::into_raw.
        drop(unsafe { Box::from_raw(model) });
    }
}

unsafe fn model_ref<'a>(model: *const RuinsimModel) -> Option<&'a Model> {
    // SAFETY: caller contract, pointer originates from model_new.
    unsafe { model.as_ref() }.map(|m| &m.inner)
}

/// Writes the derived traffic intensities of the model.
///
/// # Safety
/// `model` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn ruinsim_model_rates(
    model: *const RuinsimModel,
    out: *mut RuinsimRates,
) -> RuinsimStatus {
    let (Some(model), false) = (unsafe { model_ref(model) }, out.is_null()) else {
        return RuinsimStatus::NullArgument;
    };
    let r = model.rates();
    unsafe {
        *out = RuinsimRates {
            lambda: r.lambda,
            rho: r.rho,
            rho_d: r.rho_d,
            heavy_load: r.heavy_load,
            q: r.q,
            r: r.r,
        };
    }
    RuinsimStatus::Ok
}

macro_rules! eval_into {
    ($model:expr, $out:expr, $eval:expr) => {{
        let (Some(model), false) = (unsafe { model_ref($model) }, $out.is_null()) else {
            return RuinsimStatus::NullArgument;
        };
        #[allow(clippy::redundant_closure_call)]
        match $eval(model) {
            Ok(v) => {
                unsafe { *$out = v };
                RuinsimStatus::Ok
            }
            Err(status) => status,
        }
    }};
}

fn require_capital(u: f64) -> Result<(), RuinsimStatus> {
    if u.is_finite() && u >= 0.0 {
        Ok(())
    } else {
        Err(RuinsimStatus::InvalidArgument)
    }
}

/// Exact ruin probability of the discard base model, ψ_d(u).
///
/// # Safety
/// `model` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn ruinsim_psi_d(
    model: *const RuinsimModel,
    u: f64,
    out: *mut f64,
) -> RuinsimStatus {
    eval_into!(model, out, |m: &Model| {
        require_capital(u)?;
        Ok(m.psi_d_exact(u))
    })
}

/// Convolution tail F̄_D(u) = P(M_d + H_e > u).
///
/// # Safety
/// `model` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn ruinsim_ccdf_d(
    model: *const RuinsimModel,
    u: f64,
    out: *mut f64,
) -> RuinsimStatus {
    eval_into!(model, out, |m: &Model| {
        require_capital(u)?;
        m.ccdf_d(u).map_err(|_| RuinsimStatus::NumericalError)
    })
}

/// Convolution tail G₁(u) = P(M⁰ + M¹ + H_e > u).
///
/// # Safety
/// `model` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn ruinsim_g1(
    model: *const RuinsimModel,
    u: f64,
    out: *mut f64,
) -> RuinsimStatus {
    eval_into!(model, out, |m: &Model| {
        require_capital(u)?;
        m.g1(u).map_err(|_| RuinsimStatus::NumericalError)
    })
}

/// Heavy-tail asymptote εη_H/(1-ρ)·F̄_{H_e}(u).
///
/// # Safety
/// `model` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn ruinsim_heavy_tail_approx(
    model: *const RuinsimModel,
    u: f64,
    out: *mut f64,
) -> RuinsimStatus {
    eval_into!(model, out, |m: &Model| {
        require_capital(u)?;
        Ok(ruinsim::analysis::heavy_tail_approx(m, u))
    })
}

/// nth order truncation approximation z_n(u) for the selected series.
///
/// # Safety
/// `model` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn ruinsim_z_n(
    model: *const RuinsimModel,
    series: RuinsimSeries,
    u: f64,
    n: u32,
    out: *mut f64,
) -> RuinsimStatus {
    eval_into!(model, out, |m: &Model| {
        require_capital(u)?;
        Ok(ruinsim::analysis::z_n(series.into(), m, u, n))
    })
}

/// Error bracket for R(u) - z_n(u) of the discard series.
///
/// # Safety
/// `model` must be a live handle; `lower` and `upper` must point to
/// writable storage.
#[no_mangle]
pub unsafe extern "C" fn ruinsim_error_bounds(
    model: *const RuinsimModel,
    u: f64,
    n: u32,
    lower: *mut f64,
    upper: *mut f64,
) -> RuinsimStatus {
    let (Some(model), false, false) =
        (unsafe { model_ref(model) }, lower.is_null(), upper.is_null())
    else {
        return RuinsimStatus::NullArgument;
    };
    if require_capital(u).is_err() || n < 2 {
        return RuinsimStatus::InvalidArgument;
    }
    match ruinsim::analysis::error_bounds(model, u, n) {
        Ok((lo, hi)) => {
            unsafe {
                *lower = lo;
                *upper = hi;
            }
            RuinsimStatus::Ok
        }
        Err(_) => RuinsimStatus::NumericalError,
    }
}

/// Asymptotic variance-reduction constants at truncation order n.
///
/// # Safety
/// `model` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn ruinsim_variance_constants(
    model: *const RuinsimModel,
    n: u32,
    out: *mut RuinsimVarianceConstants,
) -> RuinsimStatus {
    eval_into!(model, out, |m: &Model| {
        if n == 0 {
            return Err(RuinsimStatus::InvalidArgument);
        }
        let c = ruinsim::analysis::variance_constants(m, n);
        Ok(RuinsimVarianceConstants {
            ratio_new: c.ratio_new,
            ratio_pk: c.ratio_pk,
            cross_cv: c.cross_cv,
            cross_raw: c.cross_raw,
        })
    })
}

impl From<RuinsimSeries> for Series {
    fn from(s: RuinsimSeries) -> Self {
        match s {
            RuinsimSeries::New => Series::New,
            RuinsimSeries::Pk => Series::Pk,
        }
    }
}

impl From<RuinsimMethod> for Method {
    fn from(m: RuinsimMethod) -> Self {
        match m {
            RuinsimMethod::Crude => Method::Crude,
            RuinsimMethod::CvMax => Method::CvMax,
            RuinsimMethod::Ak => Method::Ak,
            RuinsimMethod::AkCv => Method::AkCv,
        }
    }
}

/// Runs one estimator and writes both the series remainder estimate and the
/// assembled ruin probability ψ̂(u). Replications derive deterministic
/// streams from (seed, index); identical inputs reproduce identical output.
///
/// # Safety
/// `model` must be a live handle; `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn ruinsim_estimate(
    model: *const RuinsimModel,
    series: RuinsimSeries,
    method: RuinsimMethod,
    u: f64,
    n: u32,
    reps: u64,
    seed: u64,
    out: *mut RuinsimEstimate,
) -> RuinsimStatus {
    eval_into!(model, out, |m: &Model| {
        require_capital(u)?;
        let kind = EstimatorKind {
            series: series.into(),
            method: method.into(),
        };
        let remainder = estimators::run_estimator(kind, m, u, n, reps as usize, seed)
            .map_err(estimate_status)?;
        let psi = estimators::assemble_psi(m, u, &remainder).map_err(estimate_status)?;
        Ok(RuinsimEstimate {
            remainder: remainder.estimate,
            psi_hat: psi.estimate,
            std_err: psi.std_err,
            ci_lo: psi.ci95.0,
            ci_hi: psi.ci95.1,
            beta_hat: psi.beta_hat,
            corr_hat: psi.corr_hat,
            reps: psi.reps as u64,
        })
    })
}

fn estimate_status(e: estimators::EstimatorError) -> RuinsimStatus {
    use estimators::EstimatorError::*;
    match e {
        InsufficientSample { .. } => RuinsimStatus::InsufficientSample,
        TruncationOrder(_) | InvalidCapital(_) | MalformedBatch(_) => {
            RuinsimStatus::InvalidArgument
        }
        Model(_) => RuinsimStatus::NumericalError,
    }
}

/// Exponential integral Ei(x) for x > 0.
///
/// # Safety
/// `out` must point to writable storage.
#[no_mangle]
pub unsafe extern "C" fn ruinsim_expi(x: f64, out: *mut f64) -> RuinsimStatus {
    if out.is_null() {
        return RuinsimStatus::NullArgument;
    }
    match ruinsim::numerics::expi(x) {
        Ok(v) => {
            unsafe { *out = v };
            RuinsimStatus::Ok
        }
        Err(_) => RuinsimStatus::InvalidArgument,
    }
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn ruinsim_status_message(status: RuinsimStatus) -> *const c_char {
    let message: &'static [u8] = match status {
        RuinsimStatus::Ok => b"ok\0",
        RuinsimStatus::NullArgument => b"null pointer argument\0",
        RuinsimStatus::InvalidArgument => b"invalid argument\0",
        RuinsimStatus::NumericalError => b"numerical routine failed\0",
        RuinsimStatus::InsufficientSample => b"not enough replications\0",
    };
    message.as_ptr() as *const c_char
}
