#ifndef ENGEL_CARTAN_H
#define ENGEL_CARTAN_H

/* Generated by cbindgen from engel-cartan-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible entry point.
 */
typedef enum EcStatus {
  EC_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  EC_STATUS_NULL_ARG,
  /**
   * Manifold text was not valid UTF-8.
   */
  EC_STATUS_UTF8,
  /**
   * Manifold text failed to parse or validate.
   */
  EC_STATUS_PARSE,
  /**
   * The described distribution fails the Engel rank conditions.
   */
  EC_STATUS_DEGENERATE,
  /**
   * Y is not tangent to the canonical line field.
   */
  EC_STATUS_NOT_D0_ALIGNED,
  /**
   * Scale normalization did not converge.
   */
  EC_STATUS_NORMALIZATION_FAILED,
  /**
   * The requested analysis needs a higher jet order.
   */
  EC_STATUS_INSUFFICIENT_ORDER,
  /**
   * A linear solve or jet inversion hit a singular pivot.
   */
  EC_STATUS_SINGULAR,
  /**
   * An argument lies outside the function domain.
   */
  EC_STATUS_DOMAIN,
  /**
   * Internal invariant violation (library bug); see `ec_last_error`.
   */
  EC_STATUS_INTERNAL,
} EcStatus;

/**
 * Validated manifold plus the evaluation defaults its file declared.
 */
typedef struct EcStructure EcStructure;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on the calling thread, empty if
 * none. The pointer stays valid until the next failing call on the same
 * thread; do not free it.
 */
const char *ec_last_error(void);

/**
 * Jet order used when a manifold file or a zero `order` argument leaves
 * the choice to the library.
 */
uint32_t ec_default_order(void);

/**
 * Builds the flat cubic model with default evaluation settings (origin,
 * default order, t = 1). Returns null only on internal failure. Release
 * with `ec_structure_free`.
 */
struct EcStructure *ec_structure_cubic(void);

/**
 * Parses manifold-file text (TOML, `format = 1`) and builds its
 * structure.
 *
 * # Safety
 * `text` must point to a NUL-terminated string and `out` to writable
 * storage for one pointer. On `EC_STATUS_OK` the caller owns `*out` and
 * releases it with `ec_structure_free`; on any other status `*out` is
 * untouched.
 */
enum EcStatus ec_structure_from_manifest(const char *text, struct EcStructure **out);

/**
 * Releases a structure handle. Null is a no-op.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library that has not
 * been freed yet.
 */
void ec_structure_free(struct EcStructure *s);

/**
 * Releases a string returned by this library. Null is a no-op.
 *
 * # Safety
 * `s` must be null or a string pointer obtained from this library that
 * has not been freed yet.
 */
void ec_string_free(char *s);

/**
 * Four essential curvature components at one point, written to `out` in
 * the order R^x_{y2}, R^y_{y2}, R^2_{x3}, R^y_{x3}. Pass `order = 0`
 * and/or `t = 0` for the handle's defaults.
 *
 * # Safety
 * `s` must be a live handle, `point` must address 4 doubles (or be null
 * for the handle's first evaluation point), `out` must address 4
 * writable doubles.
 */
enum EcStatus ec_essential_curvatures(const struct EcStructure *s,
                                      const double *point,
                                      uint32_t order,
                                      double t,
                                      double *out);

/**
 * Flatness verdict over `n_points` points. Pass `points = NULL,
 * n_points = 0` for the handle's evaluation points, `order = 0` for its
 * default order.
 *
 * # Safety
 * `s` must be a live handle; `points` must address `4 * n_points`
 * doubles (x, y, u1, u2 per point) unless `n_points = 0`; `out_flat` and
 * `out_residual` must be writable.
 */
enum EcStatus ec_flatness_test(const struct EcStructure *s,
                               const double *points,
                               uintptr_t n_points,
                               uint32_t order,
                               bool *out_flat,
                               double *out_residual);

/**
 * Umbilicity verdict at one point (null for the handle's first point).
 *
 * # Safety
 * `s` must be a live handle, `point` null or 4 doubles, `out_umbilic`
 * and `out_residual` writable.
 */
enum EcStatus ec_umbilicity_test(const struct EcStructure *s,
                                 const double *point,
                                 uint32_t order,
                                 bool *out_umbilic,
                                 double *out_residual);

/**
 * JSON report of the essential curvatures at the handle's evaluation
 * points. Pass `order = 0` and/or `t = 0` for the handle's defaults. On
 * `EC_STATUS_OK` the caller owns `*out` and releases it with
 * `ec_string_free`.
 *
 * # Safety
 * `s` must be a live handle and `out` writable storage for one pointer.
 */
enum EcStatus ec_invariants_report_json(const struct EcStructure *s,
                                        uint32_t order,
                                        double t,
                                        char **out);

/**
 * JSON cohomology dimension report. Needs no handle; independent of any
 * manifold. Returns null only on internal failure. Release with
 * `ec_string_free`.
 */
char *ec_cohomology_report_json(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ENGEL_CARTAN_H */
