#ifndef HARTLEY_BESSEL_H
#define HARTLEY_BESSEL_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Quadrature rule used on each panel.
 */
typedef enum HbScheme {
  HB_SCHEME_GAUSS_LEGENDRE = 0,
  HB_SCHEME_TRAPEZOID = 1,
} HbScheme;

/**
 * Result of every fallible call.
 */
typedef enum HbStatus {
  HB_STATUS_OK = 0,
  HB_STATUS_NULL_POINTER = 1,
  HB_STATUS_INVALID_ARGUMENT = 2,
  HB_STATUS_LENGTH_MISMATCH = 3,
  HB_STATUS_NON_CONVERGENCE = 4,
  HB_STATUS_GRID_MISMATCH = 5,
  HB_STATUS_NOT_SOLVABLE = 6,
  HB_STATUS_INTERNAL = 7,
  HB_STATUS_PANIC = 8,
} HbStatus;

/**
 * Opaque node set with its weights.
 */
typedef struct HbGrid HbGrid;

/**
 * Opaque precomputed transform for one grid.
 */
typedef struct HbPlan HbPlan;

/**
 * Summary of one solve of `f + f * g = g * h`.
 */
typedef struct HbSolveInfo {
  /**
   * Smallest `|1 + H g|` over the frequency nodes.
   */
  double min_denominator;
  double min_denominator_lambda;
  /**
   * L1 residual of the returned solution.
   */
  double residual_l1;
  /**
   * Residual relative to the L1 norm of `g * h`.
   */
  double relative_residual;
} HbSolveInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a success.
 *
 * The pointer stays valid until the next call into the library on this thread.
 */
const char *hb_last_error_message(void);

/**
 * Builds a grid on `[-radius, radius]` with `panels` panels of `points` nodes each.
 *
 * # Safety
 * `out` must be a valid pointer; on success it receives a handle to release with [`hb_grid_free`].
 */
enum HbStatus hb_grid_new(double alpha,
                          double radius,
                          size_t panels,
                          size_t points,
                          enum HbScheme scheme,
                          struct HbGrid **out);

/**
 * # Safety
 * `grid` must come from [`hb_grid_new`] and not be used afterwards; null is ignored.
 */
void hb_grid_free(struct HbGrid *grid);

/**
 * Number of nodes; 0 for a null handle.
 *
 * # Safety
 * `grid` must be null or a live handle.
 */
size_t hb_grid_len(const struct HbGrid *grid);

/**
 * Copies the nodes and, if `weights` is non-null, the measure weights.
 *
 * # Safety
 * `grid` must be live; `nodes` (and `weights`, when given) must hold `len` doubles.
 */
enum HbStatus hb_grid_nodes(const struct HbGrid *grid, double *nodes, double *weights, size_t len);

/**
 * Precomputes the transform matrix for `grid`. `max_terms` of 0 keeps the default series budget.
 *
 * # Safety
 * `grid` must be live and `out` valid; release the plan with [`hb_plan_free`].
 */
enum HbStatus hb_plan_new(const struct HbGrid *grid, size_t max_terms, struct HbPlan **out);

/**
 * # Safety
 * `plan` must come from [`hb_plan_new`] and not be used afterwards; null is ignored.
 */
void hb_plan_free(struct HbPlan *plan);

/**
 * Grid size of the plan; 0 for a null handle.
 *
 * # Safety
 * `plan` must be null or a live handle.
 */
size_t hb_plan_len(const struct HbPlan *plan);

/**
 * Spectrum of `f` at the frequency nodes (which coincide with the grid nodes).
 *
 * # Safety
 * `plan` must be live; `f` and `out` must each hold `len` doubles.
 */
enum HbStatus hb_forward(const struct HbPlan *plan, const double *f, double *out, size_t len);

/**
 * Spatial samples recovered from a spectrum.
 *
 * # Safety
 * `plan` must be live; `spectrum` and `out` must each hold `len` doubles.
 */
enum HbStatus hb_inverse(const struct HbPlan *plan,
                         const double *spectrum,
                         double *out,
                         size_t len);

/**
 * Generalized convolution `f * g`.
 *
 * # Safety
 * `plan` must be live; `f`, `g` and `out` must each hold `len` doubles.
 */
enum HbStatus hb_convolve(const struct HbPlan *plan,
                          const double *f,
                          const double *g,
                          double *out,
                          size_t len);

/**
 * Solves `f + f * g = g * h`. Returns [`HbStatus::NotSolvable`] (with `info` filled
 * and `f_out` untouched) when `1 + H g` comes within `denom_threshold` of zero or
 * changes sign. A non-positive threshold selects the default.
 *
 * # Safety
 * `plan` must be live; `g`, `h` and `f_out` must each hold `len` doubles; `info` may be null.
 */
enum HbStatus hb_solve(const struct HbPlan *plan,
                       const double *g,
                       const double *h,
                       size_t len,
                       double denom_threshold,
                       double *f_out,
                       struct HbSolveInfo *info);

/**
 * Normalized Bessel function `B_order(x)`, `order > -1`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HbStatus hb_normalized_bessel(double order, double x, double *out);

/**
 * Transform kernel at `(lambda, x)` for parameter `alpha`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum HbStatus hb_kernel(double lambda, double x, double alpha, double *out);

/**
 * Weighted `L^p` norm of grid samples; `p = INFINITY` gives the sup norm.
 *
 * # Safety
 * `grid` must be live; `values` must hold `len` doubles; `out` must be valid.
 */
enum HbStatus hb_lp_norm(const struct HbGrid *grid,
                         const double *values,
                         size_t len,
                         double p,
                         double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HARTLEY_BESSEL_H */
