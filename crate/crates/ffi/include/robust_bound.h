#ifndef ROBUST_BOUND_H
#define ROBUST_BOUND_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum RbStatus {
  RB_STATUS_OK = 0,
  RB_STATUS_NULL_POINTER = 1,
  RB_STATUS_INVALID_PARAMETER = 2,
  RB_STATUS_NUMERIC = 3,
  RB_STATUS_IO = 4,
  RB_STATUS_PANIC = 5,
} RbStatus;

typedef enum RbNorm {
  RB_NORM_LINF = 0,
  RB_NORM_L2 = 1,
} RbNorm;

/**
 * Opaque labeled density.
 */
typedef struct RbDensity RbDensity;

/**
 * Cell-centered grid: cell (i, j) is centered at
 * (x0 + (i + 0.5)·dx, y0 + (j + 0.5)·dy).
 */
typedef struct RbGrid {
  double x0;
  double y0;
  double dx;
  double dy;
  size_t nx;
  size_t ny;
} RbGrid;

typedef struct RbBoundsReport {
  double epsilon;
  double tau_unc;
  double beta_d;
  double beta_dprime;
  double zeta_thm3;
  double zeta_cor1;
  double zeta_cor2;
  double zeta_sharp;
  double zeta_d;
  /**
   * 1 − zeta_d, the certified-accuracy upper bound.
   */
  double ub_zeta_d;
  double eps_eff;
  double p_min;
  double volume_k_d;
} RbBoundsReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Two-moons density. `grid` may be null for the default 512×512 grid.
 *
 * # Safety
 * `grid` must be null or point to an `RbGrid`; `out` must be writable.
 */
enum RbStatus rb_density_moons(double sigma,
                               size_t quadrature_points,
                               const struct RbGrid *grid,
                               struct RbDensity **out);

/**
 * One isotropic Gaussian per class. `means` holds `2·n_classes` values
 * (x, y per class).
 *
 * # Safety
 * `priors` and `sigmas` must hold `n_classes` values, `means`
 * `2·n_classes`; `grid` must point to an `RbGrid`; `out` must be writable.
 */
enum RbStatus rb_density_gaussian_mixture(size_t n_classes,
                                          const double *priors,
                                          const double *means,
                                          const double *sigmas,
                                          const struct RbGrid *grid,
                                          struct RbDensity **out);

/**
 * The overlapping unit squares [0,1]² and [0.5,1.5]×[0,1], equal priors.
 *
 * # Safety
 * `out` must be writable.
 */
enum RbStatus rb_density_squares(struct RbDensity **out);

/**
 * Releases a density; null is ignored.
 *
 * # Safety
 * `d` must be null or a handle from this library that was not freed.
 */
void rb_density_free(struct RbDensity *d);

/**
 * # Safety
 * `d` must be a live handle; `out_classes` and `out_grid` must be writable.
 */
enum RbStatus rb_density_info(const struct RbDensity *d,
                              size_t *out_classes,
                              struct RbGrid *out_grid);

/**
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum RbStatus rb_bayes_error(const struct RbDensity *d, double *out);

/**
 * Every bound for the ε-ball of `norm`.
 *
 * # Safety
 * `d` must be a live handle; `out` must be writable.
 */
enum RbStatus rb_bounds(const struct RbDensity *d,
                        enum RbNorm norm,
                        double epsilon,
                        double tau_unc,
                        struct RbBoundsReport *out);

/**
 * β·K/(K − 1) for a Bayes error `beta` over `num_classes` labels.
 *
 * # Safety
 * `out` must be writable.
 */
enum RbStatus rb_cor1_lower(double beta, size_t num_classes, double *out);

/**
 * Radius of the `dim`-dimensional Euclidean ball with the volume of the
 * ε-ball of `norm`.
 *
 * # Safety
 * `out` must be writable.
 */
enum RbStatus rb_effective_radius(enum RbNorm norm, double epsilon, size_t dim, double *out);

/**
 * Message of the last failed call on this thread ("" after a success).
 * Valid until the next library call on the same thread.
 */
const char *rb_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *rb_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ROBUST_BOUND_H */
