#ifndef SELFSIM_H
#define SELFSIM_H

/* Generated by cbindgen from selfsim-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by fallible API calls.
 */
typedef enum {
  SELFSIM_CODE_OK = 0,
  /**
   * A required pointer argument was NULL.
   */
  SELFSIM_CODE_NULL_ARGUMENT = 1,
  /**
   * A buffer was too small for the requested copy.
   */
  SELFSIM_CODE_BUFFER_TOO_SMALL = 2,
  /**
   * A configuration value violates an invariant.
   */
  SELFSIM_CODE_CONFIG = 3,
  /**
   * The coefficient vector does not describe a usable curve.
   */
  SELFSIM_CODE_INVALID_SHAPE = 4,
  /**
   * A kernel was evaluated at coincident points.
   */
  SELFSIM_CODE_SINGULAR_EVALUATION = 5,
  /**
   * The Newton system lost rank beyond what the step policy tolerates.
   */
  SELFSIM_CODE_SINGULAR_JACOBIAN = 6,
  /**
   * The converged state is a circle, so the requested quantity is undefined.
   */
  SELFSIM_CODE_DEGENERATE_EIGENVECTOR = 7,
  /**
   * Backtracking ran out of trial steps without decreasing the residual.
   */
  SELFSIM_CODE_LINE_SEARCH_EXHAUSTED = 8,
  /**
   * An argument is outside a closed-form formula's domain.
   */
  SELFSIM_CODE_DOMAIN = 9,
  SELFSIM_CODE_IO = 10,
  /**
   * A library invariant was violated (a bug); the message has details.
   */
  SELFSIM_CODE_INTERNAL = 11,
} SelfsimCode;

/**
 * Terminal state of a solve, mirroring the library's `SolveStatus`.
 */
typedef enum {
  SELFSIM_SOLVE_STATUS_CONVERGED = 0,
  SELFSIM_SOLVE_STATUS_TRIVIAL_CIRCLE = 1,
  SELFSIM_SOLVE_STATUS_MAX_ITERS = 2,
  SELFSIM_SOLVE_STATUS_LINE_SEARCH_FAILURE = 3,
} SelfsimSolveStatus;

/**
 * Newton step policy.
 */
typedef enum {
  /**
   * Minimize the residual over all quadrature nodes (least squares).
   */
  SELFSIM_STEP_MODE_LEAST_SQUARES = 0,
  /**
   * Project onto the cosine coefficients and solve the square system.
   */
  SELFSIM_STEP_MODE_FOURIER_PROJECTION = 1,
} SelfsimStepMode;

/**
 * Opaque solver configuration handle.
 */
typedef struct SelfsimConfig SelfsimConfig;

/**
 * Opaque physical-parameter handle (surface tension and mobilities).
 */
typedef struct SelfsimParams SelfsimParams;

/**
 * Opaque solve-result handle.
 */
typedef struct SelfsimResult SelfsimResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the most recent error message on this thread into `buf` as a
 * NUL-terminated string, truncating to `cap` bytes. Returns the full length
 * of the message (excluding the NUL), or 0 if no error has occurred. Passing
 * a NULL buffer or zero capacity just queries the length.
 *
 * # Safety
 * `buf` must be NULL or point at `cap` writable bytes.
 */
size_t selfsim_last_error(char *buf, size_t cap);

/**
 * Creates a solver configuration with the library defaults
 * (N₁ = 128, N₂ = 512, C₀ = 30, tolerance 1e-10). Never fails.
 */
SelfsimConfig *selfsim_config_new(void);

/**
 * Releases a configuration handle. Accepts NULL.
 *
 * # Safety
 * `config` must be NULL or a live handle from `selfsim_config_new`, not freed twice.
 */
void selfsim_config_free(SelfsimConfig *config);

/**
 * Sets the cosine mode count N₁ and quadrature node count N₂
 * (N₂ must be even and at least 2·N₁).
 *
 * # Safety
 * `config` must be NULL or a live handle from `selfsim_config_new`.
 */
SelfsimCode selfsim_config_set_resolution(SelfsimConfig *config, size_t n1, size_t n2);

/**
 * Sets the pre-specified flux constant C₀ the iteration holds fixed.
 *
 * # Safety
 * `config` must be NULL or a live handle from `selfsim_config_new`.
 */
SelfsimCode selfsim_config_set_flux_constant(SelfsimConfig *config, double c0);

/**
 * Sets the seed amplitude of cosine mode `k` (mode 0 is the base radius and
 * defaults to 1). `k` must be below the configured N₁.
 *
 * # Safety
 * `config` must be NULL or a live handle from `selfsim_config_new`.
 */
SelfsimCode selfsim_config_set_mode(SelfsimConfig *config, size_t k, double amplitude);

/**
 * Removes every seed amplitude set so far (the seed reverts to a circle).
 *
 * # Safety
 * `config` must be NULL or a live handle from `selfsim_config_new`.
 */
SelfsimCode selfsim_config_clear_modes(SelfsimConfig *config);

/**
 * Sets the Newton iteration knobs: stopping tolerance on max|f|, iteration
 * cap, forward-difference step, and Jacobian refresh period (1 = rebuild
 * every step).
 *
 * # Safety
 * `config` must be NULL or a live handle from `selfsim_config_new`.
 */
SelfsimCode selfsim_config_set_newton(SelfsimConfig *config,
                                      double tol,
                                      size_t max_iters,
                                      double fd_step,
                                      size_t refresh);

/**
 * Sets the backtracking line-search knobs: shrink factor in (0,1) and the
 * maximum number of backtracks per step.
 *
 * # Safety
 * `config` must be NULL or a live handle from `selfsim_config_new`.
 */
SelfsimCode selfsim_config_set_line_search(SelfsimConfig *config,
                                           double shrink,
                                           size_t max_backtracks);

/**
 * Selects the Newton step policy.
 *
 * # Safety
 * `config` must be NULL or a live handle from `selfsim_config_new`.
 */
SelfsimCode selfsim_config_set_step_mode(SelfsimConfig *config, SelfsimStepMode mode);

/**
 * Creates the default parameter set: surface tension τ = 1 and the one-phase
 * mobility limit (k_eff = 2, atwood = −1). Never fails.
 */
SelfsimParams *selfsim_params_new(void);

/**
 * Creates a parameter set from surface tension τ > 0, effective mobility
 * k_eff = 2K₁K₂/(K₁+K₂) > 0, and contrast atwood = (K₂−K₁)/(K₂+K₁) ∈ [−1, 1].
 * On success writes the handle to `out`.
 *
 * # Safety
 * `out` must be NULL or point at a writable pointer slot.
 */
SelfsimCode selfsim_params_new_custom(double tau, double k_eff, double atwood, SelfsimParams **out);

/**
 * Releases a parameter handle. Accepts NULL.
 *
 * # Safety
 * `params` must be NULL or a live handle from a `selfsim_params_new*` call, not freed twice.
 */
void selfsim_params_free(SelfsimParams *params);

/**
 * Runs the quasi-Newton iteration for a self-similar interface at the
 * configured C₀ and seed. On success writes a result handle to `out`; the
 * handle must be released with `selfsim_result_free`. A solve that stops
 * without converging (circle, iteration cap, stalled line search) still
 * returns OK — inspect `selfsim_result_status`.
 *
 * # Safety
 * Handles must be NULL or live; `out` must be NULL or point at a writable pointer slot.
 */
SelfsimCode selfsim_solve(const SelfsimConfig *config,
                          const SelfsimParams *params,
                          SelfsimResult **out);

/**
 * Releases a result handle. Accepts NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle from `selfsim_solve`, not freed twice.
 */
void selfsim_result_free(SelfsimResult *result);

/**
 * Terminal state of the solve. NULL maps to LINE_SEARCH_FAILURE.
 *
 * # Safety
 * `result` must be NULL or a live handle from `selfsim_solve`.
 */
SelfsimSolveStatus selfsim_result_status(const SelfsimResult *result);

/**
 * Flux constant of the normalized eigenpair. Fails with
 * DEGENERATE_EIGENVECTOR when the converged state is a circle (every C is an
 * eigenvalue there, so none is reported).
 *
 * # Safety
 * `result`/`out` must be NULL or valid (`out`: a writable f64).
 */
SelfsimCode selfsim_result_flux_constant(const SelfsimResult *result, double *out);

/**
 * Node-to-node spread of the recovered flux constant (a self-similarity
 * diagnostic); NaN when no flux constant is defined or `result` is NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle from `selfsim_solve`.
 */
double selfsim_result_c_spread(const SelfsimResult *result);

/**
 * Shape factor δ/R of the converged shape (max deviation of |x| from the
 * effective radius, relative). NaN if `result` is NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle from `selfsim_solve`.
 */
double selfsim_result_shape_factor(const SelfsimResult *result);

/**
 * Cosine mode with the largest converged amplitude; 0 for a circle or NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle from `selfsim_solve`.
 */
size_t selfsim_result_dominant_fold(const SelfsimResult *result);

/**
 * Number of accepted Newton steps; 0 if `result` is NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle from `selfsim_solve`.
 */
size_t selfsim_result_iterations(const SelfsimResult *result);

/**
 * Number of cosine coefficients in the converged shape (N₁); 0 if NULL.
 *
 * # Safety
 * `result` must be NULL or a live handle from `selfsim_solve`.
 */
size_t selfsim_result_coefficient_count(const SelfsimResult *result);

/**
 * Copies the converged cosine coefficients δ₀ … δ_{N₁−1} into `buf`.
 * `len` must be at least `selfsim_result_coefficient_count`.
 *
 * # Safety
 * `result` must be NULL or live; `buf` must be NULL or point at `len` writable f64s.
 */
SelfsimCode selfsim_result_coefficients(const SelfsimResult *result, double *buf, size_t len);

/**
 * Number of residual-history entries (the seed plus one per accepted step).
 *
 * # Safety
 * `result` must be NULL or a live handle from `selfsim_solve`.
 */
size_t selfsim_result_residual_count(const SelfsimResult *result);

/**
 * Copies the residual history (max|f| after each accepted step, seed first)
 * into `buf`. `len` must be at least `selfsim_result_residual_count`.
 *
 * # Safety
 * `result` must be NULL or live; `buf` must be NULL or point at `len` writable f64s.
 */
SelfsimCode selfsim_result_residuals(const SelfsimResult *result, double *buf, size_t len);

/**
 * Small-amplitude onset flux constant k(k²−1)/(k−2) for fold k ≥ 3 in the
 * one-phase limit with τ = 1.
 *
 * # Safety
 * `out` must be NULL or point at a writable f64.
 */
SelfsimCode selfsim_linear_flux_constant(uint32_t k, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SELFSIM_H */
