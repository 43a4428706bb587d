//! C ABI over the selfsim solver.
//!
//! Conventions:
//! - Handles (`SelfsimConfig`, `SelfsimParams`, `SelfsimResult`) are opaque;
//!   create with `*_new`, release with `*_free`. Every `*_free` accepts NULL.
//! - Fallible calls return `SelfsimCode`; `SELFSIM_CODE_OK` is 0. On any other
//!   code a human-readable message is stored per thread and can be fetched
//!   with `selfsim_last_error`.
//! - Scalar accessors on a NULL handle return 0 (or NaN for floating-point)
//!   rather than crashing.
//! - No call touches global state other than the thread-local error message,
//!   so handles may be used from multiple threads as long as each handle is
//!   externally synchronized.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use selfsim::solver::solve_self_similar;
use selfsim::{PhysicalParams, SelfsimError, SolveResult, SolveStatus, SolverConfig, StepMode};

/// Status code returned by fallible API calls.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelfsimCode {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullArgument = 1,
    /// A buffer was too small for the requested copy.
    BufferTooSmall = 2,
    /// A configuration value violates an invariant.
    Config = 3,
    /// The coefficient vector does not describe a usable curve.
    InvalidShape = 4,
    /// A kernel was evaluated at coincident points.
    SingularEvaluation = 5,
    /// The Newton system lost rank beyond what the step policy tolerates.
    SingularJacobian = 6,
    /// The converged state is a circle, so the requested quantity is undefined.
    DegenerateEigenvector = 7,
    /// Backtracking ran out of trial steps without decreasing the residual.
    LineSearchExhausted = 8,
    /// An argument is outside a closed-form formula's domain.
    Domain = 9,
    Io = 10,
    /// A library invariant was violated (a bug); the message has details.
    Internal = 11,
}

/// Terminal state of a solve, mirroring the library's `SolveStatus`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelfsimSolveStatus {
    Converged = 0,
    TrivialCircle = 1,
    MaxIters = 2,
    LineSearchFailure = 3,
}

/// Newton step policy.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelfsimStepMode {
    /// Minimize the residual over all quadrature nodes (least squares).
    LeastSquares = 0,
    /// Project onto the cosine coefficients and solve the square system.
    FourierProjection = 1,
}

/// Opaque solver configuration handle.
pub struct SelfsimConfig {
    inner: SolverConfig,
}

/// Opaque physical-parameter handle (surface tension and mobilities).
pub struct SelfsimParams {
    inner: PhysicalParams,
}

/// Opaque solve-result handle.
pub struct SelfsimResult {
    inner: SolveResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn code_for(err: &SelfsimError) -> SelfsimCode {
    match err {
        SelfsimError::InvalidShape(_) => SelfsimCode::InvalidShape,
        SelfsimError::SingularEvaluation => SelfsimCode::SingularEvaluation,
        SelfsimError::SingularJacobian(_) => SelfsimCode::SingularJacobian,
        SelfsimError::DegenerateEigenvector => SelfsimCode::DegenerateEigenvector,
        SelfsimError::LineSearchExhausted(_) => SelfsimCode::LineSearchExhausted,
        SelfsimError::Domain(_) => SelfsimCode::Domain,
        SelfsimError::Config(_) => SelfsimCode::Config,
        SelfsimError::Io(_) => SelfsimCode::Io,
        SelfsimError::Json(_) => SelfsimCode::Internal,
    }
}

fn fail(err: &SelfsimError) -> SelfsimCode {
    set_last_error(&err.to_string());
    code_for(err)
}

fn null_argument(what: &str) -> SelfsimCode {
    set_last_error(&format!("{what} is NULL"));
    SelfsimCode::NullArgument
}

/// Runs an FFI body, converting panics into an error code instead of
/// unwinding across the C boundary.
fn guarded<F: FnOnce() -> SelfsimCode>(f: F) -> SelfsimCode {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(code) => code,
        Err(_) => {
            set_last_error("internal panic");
            SelfsimCode::Internal
        }
    }
}

/// Copies the most recent error message on this thread into `buf` as a
/// NUL-terminated string, truncating to `cap` bytes. Returns the full length
/// of the message (excluding the NUL), or 0 if no error has occurred. Passing
/// a NULL buffer or zero capacity just queries the length.
///
/// # Safety
/// `buf` must be NULL or point at `cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn selfsim_last_error(buf: *mut c_char, cap: usize) -> usize {
    LAST_ERROR.with(|slot| {
        let slot = slot.borrow();
        let Some(msg) = slot.as_ref() else { return 0 };
        let bytes = msg.as_bytes();
        if !buf.is_null() && cap > 0 {
            let n = bytes.len().min(cap - 1);
            // Safety: caller promises `buf` points at `cap` writable bytes.
            unsafe {
                ptr::copy_nonoverlapping(bytes.as_ptr(), buf as *mut u8, n);
                *buf.add(n) = 0;
            }
        }
        bytes.len()
    })
}

// ---------------------------------------------------------------------------
// Configuration
// ---------------------------------------------------------------------------

/// Creates a solver configuration with the library defaults
/// (N₁ = 128, N₂ = 512, C₀ = 30, tolerance 1e-10). Never fails.
#[no_mangle]
pub extern "C" fn selfsim_config_new() -> *mut SelfsimConfig {
    Box::into_raw(Box::new(SelfsimConfig {
        inner: SolverConfig::default(),
    }))
}

/// Releases a configuration handle. Accepts NULL.
///
/// # Safety
/// `config` must be NULL or a live handle from `selfsim_config_new`, not freed twice.
#[no_mangle]
pub unsafe extern "C" fn selfsim_config_free(config: *mut SelfsimConfig) {
    if !config.is_null() {
        // Safety: pointer came from `selfsim_config_new` and is not reused.
        drop(unsafe { Box::from_raw(config) });
    }
}

/// Sets the cosine mode count N₁ and quadrature node count N₂
/// (N₂ must be even and at least 2·N₁).
///
/// # Safety
/// `config` must be NULL or a live handle from `selfsim_config_new`.
#[no_mangle]
pub unsafe extern "C" fn selfsim_config_set_resolution(
    config: *mut SelfsimConfig,
    n1: usize,
    n2: usize,
) -> SelfsimCode {
    guarded(|| {
        let Some(config) = (unsafe { config.as_mut() }) else {
            return null_argument("config");
        };
        let mut candidate = config.inner.clone();
        candidate.n1 = n1;
        candidate.n2 = n2;
        match candidate.validate() {
            Ok(()) => {
                config.inner = candidate;
                SelfsimCode::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Sets the pre-specified flux constant C₀ the iteration holds fixed.
///
/// # Safety
/// `config` must be NULL or a live handle from `selfsim_config_new`.
#[no_mangle]
pub unsafe extern "C" fn selfsim_config_set_flux_constant(
    config: *mut SelfsimConfig,
    c0: f64,
) -> SelfsimCode {
    guarded(|| {
        let Some(config) = (unsafe { config.as_mut() }) else {
            return null_argument("config");
        };
        if !c0.is_finite() {
            set_last_error("c0 must be finite");
            return SelfsimCode::Config;
        }
        config.inner.c0 = c0;
        SelfsimCode::Ok
    })
}

/// Sets the seed amplitude of cosine mode `k` (mode 0 is the base radius and
/// defaults to 1). `k` must be below the configured N₁.
///
/// # Safety
/// `config` must be NULL or a live handle from `selfsim_config_new`.
#[no_mangle]
pub unsafe extern "C" fn selfsim_config_set_mode(
    config: *mut SelfsimConfig,
    k: usize,
    amplitude: f64,
) -> SelfsimCode {
    guarded(|| {
        let Some(config) = (unsafe { config.as_mut() }) else {
            return null_argument("config");
        };
        if k >= config.inner.n1 {
            set_last_error(&format!(
                "mode {k} is outside the n1 = {} coefficient range",
                config.inner.n1
            ));
            return SelfsimCode::Config;
        }
        if !amplitude.is_finite() {
            set_last_error("mode amplitude must be finite");
            return SelfsimCode::Config;
        }
        config.inner.initial_modes.insert(k, amplitude);
        SelfsimCode::Ok
    })
}

/// Removes every seed amplitude set so far (the seed reverts to a circle).
///
/// # Safety
/// `config` must be NULL or a live handle from `selfsim_config_new`.
#[no_mangle]
pub unsafe extern "C" fn selfsim_config_clear_modes(config: *mut SelfsimConfig) -> SelfsimCode {
    guarded(|| {
        let Some(config) = (unsafe { config.as_mut() }) else {
            return null_argument("config");
        };
        config.inner.initial_modes.clear();
        SelfsimCode::Ok
    })
}

/// Sets the Newton iteration knobs: stopping tolerance on max|f|, iteration
/// cap, forward-difference step, and Jacobian refresh period (1 = rebuild
/// every step).
///
/// # Safety
/// `config` must be NULL or a live handle from `selfsim_config_new`.
#[no_mangle]
pub unsafe extern "C" fn selfsim_config_set_newton(
    config: *mut SelfsimConfig,
    tol: f64,
    max_iters: usize,
    fd_step: f64,
    refresh: usize,
) -> SelfsimCode {
    guarded(|| {
        let Some(config) = (unsafe { config.as_mut() }) else {
            return null_argument("config");
        };
        let mut candidate = config.inner.clone();
        candidate.newton_tol = tol;
        candidate.max_iters = max_iters;
        candidate.fd_step = fd_step;
        candidate.jacobian_refresh = refresh;
        match candidate.validate() {
            Ok(()) => {
                config.inner = candidate;
                SelfsimCode::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Sets the backtracking line-search knobs: shrink factor in (0,1) and the
/// maximum number of backtracks per step.
///
/// # Safety
/// `config` must be NULL or a live handle from `selfsim_config_new`.
#[no_mangle]
pub unsafe extern "C" fn selfsim_config_set_line_search(
    config: *mut SelfsimConfig,
    shrink: f64,
    max_backtracks: usize,
) -> SelfsimCode {
    guarded(|| {
        let Some(config) = (unsafe { config.as_mut() }) else {
            return null_argument("config");
        };
        let mut candidate = config.inner.clone();
        candidate.ls_shrink = shrink;
        candidate.ls_max_backtracks = max_backtracks;
        match candidate.validate() {
            Ok(()) => {
                config.inner = candidate;
                SelfsimCode::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Selects the Newton step policy.
///
/// # Safety
/// `config` must be NULL or a live handle from `selfsim_config_new`.
#[no_mangle]
pub unsafe extern "C" fn selfsim_config_set_step_mode(
    config: *mut SelfsimConfig,
    mode: SelfsimStepMode,
) -> SelfsimCode {
    guarded(|| {
        let Some(config) = (unsafe { config.as_mut() }) else {
            return null_argument("config");
        };
        config.inner.step_mode = match mode {
            SelfsimStepMode::LeastSquares => StepMode::LeastSquares,
            SelfsimStepMode::FourierProjection => StepMode::FourierProjection,
        };
        SelfsimCode::Ok
    })
}

// ---------------------------------------------------------------------------
// Physical parameters
// ---------------------------------------------------------------------------

/// Creates the default parameter set: surface tension τ = 1 and the one-phase
/// mobility limit (k_eff = 2, atwood = −1). Never fails.
#[no_mangle]
pub extern "C" fn selfsim_params_new() -> *mut SelfsimParams {
    Box::into_raw(Box::new(SelfsimParams {
        inner: PhysicalParams::default(),
    }))
}

/// Creates a parameter set from surface tension τ > 0, effective mobility
/// k_eff = 2K₁K₂/(K₁+K₂) > 0, and contrast atwood = (K₂−K₁)/(K₂+K₁) ∈ [−1, 1].
/// On success writes the handle to `out`.
///
/// # Safety
/// `out` must be NULL or point at a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn selfsim_params_new_custom(
    tau: f64,
    k_eff: f64,
    atwood: f64,
    out: *mut *mut SelfsimParams,
) -> SelfsimCode {
    guarded(|| {
        if out.is_null() {
            return null_argument("out");
        }
        let params = PhysicalParams { tau, k_eff, atwood };
        match params.validate() {
            Ok(()) => {
                // Safety: `out` is non-null and points at a writable pointer slot.
                unsafe {
                    *out = Box::into_raw(Box::new(SelfsimParams { inner: params }));
                }
                SelfsimCode::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a parameter handle. Accepts NULL.
///
/// # Safety
/// `params` must be NULL or a live handle from a `selfsim_params_new*` call, not freed twice.
#[no_mangle]
pub unsafe extern "C" fn selfsim_params_free(params: *mut SelfsimParams) {
    if !params.is_null() {
        // Safety: pointer came from a `selfsim_params_new*` call.
        drop(unsafe { Box::from_raw(params) });
    }
}

// ---------------------------------------------------------------------------
// Solving
// ---------------------------------------------------------------------------

/// Runs the quasi-Newton iteration for a self-similar interface at the
/// configured C₀ and seed. On success writes a result handle to `out`; the
/// handle must be released with `selfsim_result_free`. A solve that stops
/// without converging (circle, iteration cap, stalled line search) still
/// returns OK — inspect `selfsim_result_status`.
///
/// # Safety
/// Handles must be NULL or live; `out` must be NULL or point at a writable pointer slot.
#[no_mangle]
pub unsafe extern "C" fn selfsim_solve(
    config: *const SelfsimConfig,
    params: *const SelfsimParams,
    out: *mut *mut SelfsimResult,
) -> SelfsimCode {
    guarded(|| {
        let Some(config) = (unsafe { config.as_ref() }) else {
            return null_argument("config");
        };
        let Some(params) = (unsafe { params.as_ref() }) else {
            return null_argument("params");
        };
        if out.is_null() {
            return null_argument("out");
        }
        match solve_self_similar(&config.inner, &params.inner) {
            Ok(result) => {
                // Safety: `out` is non-null and points at a writable pointer slot.
                unsafe {
                    *out = Box::into_raw(Box::new(SelfsimResult { inner: result }));
                }
                SelfsimCode::Ok
            }
            Err(e) => fail(&e),
        }
    })
}

/// Releases a result handle. Accepts NULL.
///
/// # Safety
/// `result` must be NULL or a live handle from `selfsim_solve`, not freed twice.
#[no_mangle]
pub unsafe extern "C" fn selfsim_result_free(result: *mut SelfsimResult) {
    if !result.is_null() {
        // Safety: pointer came from `selfsim_solve`.
        drop(unsafe { Box::from_raw(result) });
    }
}

// ---------------------------------------------------------------------------
// Result accessors
// ---------------------------------------------------------------------------

/// Terminal state of the solve. NULL maps to LINE_SEARCH_FAILURE.
///
/// # Safety
/// `result` must be NULL or a live handle from `selfsim_solve`.
#[no_mangle]
pub unsafe extern "C" fn selfsim_result_status(result: *const SelfsimResult) -> SelfsimSolveStatus {
    let Some(result) = (unsafe { result.as_ref() }) else {
        return SelfsimSolveStatus::LineSearchFailure;
    };
    match result.inner.status {
        SolveStatus::Converged => SelfsimSolveStatus::Converged,
        SolveStatus::TrivialCircle => SelfsimSolveStatus::TrivialCircle,
        SolveStatus::MaxIters => SelfsimSolveStatus::MaxIters,
        SolveStatus::LineSearchFailure => SelfsimSolveStatus::LineSearchFailure,
    }
}

/// Flux constant of the normalized eigenpair. Fails with
/// DEGENERATE_EIGENVECTOR when the converged state is a circle (every C is an
/// eigenvalue there, so none is reported).
///
/// # Safety
/// `result`/`out` must be NULL or valid (`out`: a writable f64).
#[no_mangle]
pub unsafe extern "C" fn selfsim_result_flux_constant(
    result: *const SelfsimResult,
    out: *mut f64,
) -> SelfsimCode {
    guarded(|| {
        let Some(result) = (unsafe { result.as_ref() }) else {
            return null_argument("result");
        };
        if out.is_null() {
            return null_argument("out");
        }
        match result.inner.c_converged {
            Some(c) => {
                // Safety: `out` is non-null and points at a writable f64.
                unsafe { *out = c };
                SelfsimCode::Ok
            }
            None => fail(&SelfsimError::DegenerateEigenvector),
        }
    })
}

/// Node-to-node spread of the recovered flux constant (a self-similarity
/// diagnostic); NaN when no flux constant is defined or `result` is NULL.
///
/// # Safety
/// `result` must be NULL or a live handle from `selfsim_solve`.
#[no_mangle]
pub unsafe extern "C" fn selfsim_result_c_spread(result: *const SelfsimResult) -> f64 {
    let Some(result) = (unsafe { result.as_ref() }) else {
        return f64::NAN;
    };
    result.inner.c_spread.unwrap_or(f64::NAN)
}

/// Shape factor δ/R of the converged shape (max deviation of |x| from the
/// effective radius, relative). NaN if `result` is NULL.
///
/// # Safety
/// `result` must be NULL or a live handle from `selfsim_solve`.
#[no_mangle]
pub unsafe extern "C" fn selfsim_result_shape_factor(result: *const SelfsimResult) -> f64 {
    let Some(result) = (unsafe { result.as_ref() }) else {
        return f64::NAN;
    };
    result.inner.shape_factor
}

/// Cosine mode with the largest converged amplitude; 0 for a circle or NULL.
///
/// # Safety
/// `result` must be NULL or a live handle from `selfsim_solve`.
#[no_mangle]
pub unsafe extern "C" fn selfsim_result_dominant_fold(result: *const SelfsimResult) -> usize {
    let Some(result) = (unsafe { result.as_ref() }) else {
        return 0;
    };
    result.inner.dominant_fold
}

/// Number of accepted Newton steps; 0 if `result` is NULL.
///
/// # Safety
/// `result` must be NULL or a live handle from `selfsim_solve`.
#[no_mangle]
pub unsafe extern "C" fn selfsim_result_iterations(result: *const SelfsimResult) -> usize {
    let Some(result) = (unsafe { result.as_ref() }) else {
        return 0;
    };
    result.inner.iterations
}

/// Number of cosine coefficients in the converged shape (N₁); 0 if NULL.
///
/// # Safety
/// `result` must be NULL or a live handle from `selfsim_solve`.
#[no_mangle]
pub unsafe extern "C" fn selfsim_result_coefficient_count(result: *const SelfsimResult) -> usize {
    let Some(result) = (unsafe { result.as_ref() }) else {
        return 0;
    };
    result.inner.shape.coeffs.len()
}

/// Copies the converged cosine coefficients δ₀ … δ_{N₁−1} into `buf`.
/// `len` must be at least `selfsim_result_coefficient_count`.
///
/// # Safety
/// `result` must be NULL or live; `buf` must be NULL or point at `len` writable f64s.
#[no_mangle]
pub unsafe extern "C" fn selfsim_result_coefficients(
    result: *const SelfsimResult,
    buf: *mut f64,
    len: usize,
) -> SelfsimCode {
    guarded(|| {
        let Some(result) = (unsafe { result.as_ref() }) else {
            return null_argument("result");
        };
        if buf.is_null() {
            return null_argument("buf");
        }
        let coeffs = &result.inner.shape.coeffs;
        if len < coeffs.len() {
            set_last_error(&format!(
                "buffer holds {len} values but the shape has {} coefficients",
                coeffs.len()
            ));
            return SelfsimCode::BufferTooSmall;
        }
        // Safety: caller promises `buf` points at `len >= coeffs.len()` f64s.
        unsafe { ptr::copy_nonoverlapping(coeffs.as_ptr(), buf, coeffs.len()) };
        SelfsimCode::Ok
    })
}

/// Number of residual-history entries (the seed plus one per accepted step).
///
/// # Safety
/// `result` must be NULL or a live handle from `selfsim_solve`.
#[no_mangle]
pub unsafe extern "C" fn selfsim_result_residual_count(result: *const SelfsimResult) -> usize {
    let Some(result) = (unsafe { result.as_ref() }) else {
        return 0;
    };
    result.inner.residual_history.len()
}

/// Copies the residual history (max|f| after each accepted step, seed first)
/// into `buf`. `len` must be at least `selfsim_result_residual_count`.
///
/// # Safety
/// `result` must be NULL or live; `buf` must be NULL or point at `len` writable f64s.
#[no_mangle]
pub unsafe extern "C" fn selfsim_result_residuals(
    result: *const SelfsimResult,
    buf: *mut f64,
    len: usize,
) -> SelfsimCode {
    guarded(|| {
        let Some(result) = (unsafe { result.as_ref() }) else {
            return null_argument("result");
        };
        if buf.is_null() {
            return null_argument("buf");
        }
        let history = &result.inner.residual_history;
        if len < history.len() {
            set_last_error(&format!(
                "buffer holds {len} values but the history has {} entries",
                history.len()
            ));
            return SelfsimCode::BufferTooSmall;
        }
        // Safety: caller promises `buf` points at `len >= history.len()` f64s.
        unsafe { ptr::copy_nonoverlapping(history.as_ptr(), buf, history.len()) };
        SelfsimCode::Ok
    })
}

// ---------------------------------------------------------------------------
// Closed-form linear theory
// ---------------------------------------------------------------------------

/// Small-amplitude onset flux constant k(k²−1)/(k−2) for fold k ≥ 3 in the
/// one-phase limit with τ = 1.
///
/// # Safety
/// `out` must be NULL or point at a writable f64.
#[no_mangle]
pub unsafe extern "C" fn selfsim_linear_flux_constant(k: u32, out: *mut f64) -> SelfsimCode {
    guarded(|| {
        if out.is_null() {
            return null_argument("out");
        }
        match selfsim::linear_theory::linear_flux_constant(k) {
            Ok(c) => {
                // Safety: `out` is non-null and points at a writable f64.
                unsafe { *out = c };
                SelfsimCode::Ok
            }
            Err(e) => fail(&e),
        }
    })
}
