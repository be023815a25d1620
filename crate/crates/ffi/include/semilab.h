/* Copyright 2026 The semilab Authors
 * SPDX-License-Identifier: Apache-2.0 */

#ifndef SEMILAB_H
#define SEMILAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SemilabStatus {
  SEMILAB_STATUS_OK = 0,
  SEMILAB_STATUS_NULL_POINTER = 1,
  SEMILAB_STATUS_INVALID_UTF8 = 2,
  SEMILAB_STATUS_INVALID_INPUT = 3,
  SEMILAB_STATUS_NUMERICAL = 4,
  SEMILAB_STATUS_IO = 5,
  SEMILAB_STATUS_PANIC = 6,
} SemilabStatus;

/**
 * Opaque generator handle.
 */
typedef struct SemilabGenerator SemilabGenerator;

/**
 * Opaque polynomial handle.
 */
typedef struct SemilabPolynomial SemilabPolynomial;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *semilab_version(void);

/**
 * Message of the last failed call on this thread; empty after success.
 * Valid until the next call on the same thread.
 */
const char *semilab_last_error(void);

/**
 * Builds a zoo generator. `params_json` may be null or a JSON object such
 * as `{"phi": 0.5}`.
 *
 * # Safety
 * `name` and `params_json` must be null or NUL-terminated strings; `out`
 * must be writable.
 */
enum SemilabStatus semilab_generator_from_zoo(const char *name,
                                              uintptr_t dim,
                                              const char *params_json,
                                              struct SemilabGenerator **out_gen);

/**
 * Builds a generator from a row-major `dim × dim` matrix; `im` may be null
 * for a real matrix.
 *
 * # Safety
 * `re` (and `im` if non-null) must point to `dim*dim` doubles.
 */
enum SemilabStatus semilab_generator_from_matrix(uintptr_t dim,
                                                 const double *re,
                                                 const double *im,
                                                 struct SemilabGenerator **out_gen);

/**
 * Dimension of a generator, or 0 for null.
 *
 * # Safety
 * `gen` must be null or a live handle.
 */
uintptr_t semilab_generator_dim(const struct SemilabGenerator *gen);

/**
 * # Safety
 * `gen` must be null or a handle not yet freed.
 */
void semilab_generator_free(struct SemilabGenerator *gen);

/**
 * Polynomial from `n` coefficients, lowest degree first; `im` may be null.
 *
 * # Safety
 * `re` (and `im` if non-null) must point to `n` doubles.
 */
enum SemilabStatus semilab_polynomial_new(uintptr_t n,
                                          const double *re,
                                          const double *im,
                                          struct SemilabPolynomial **out_poly);

/**
 * # Safety
 * `poly` must be null or a handle not yet freed.
 */
void semilab_polynomial_free(struct SemilabPolynomial *poly);

/**
 * Supremum of `|f|` over the closed unit disc.
 *
 * # Safety
 * `poly` must be a live handle and `out_value` writable.
 */
enum SemilabStatus semilab_polynomial_disc_norm(const struct SemilabPolynomial *poly,
                                                double *out_value);

/**
 * `‖e^{tA}‖` in unit-weight `ℓ^p` (`p = INFINITY` allowed). If
 * `out_lower_bound` is non-null it receives 1 when the value is only a
 * lower bound.
 *
 * # Safety
 * `gen` must be a live handle, `out_value` writable, `out_lower_bound`
 * null or writable.
 */
enum SemilabStatus semilab_semigroup_norm(const struct SemilabGenerator *gen,
                                          double t,
                                          double p,
                                          double *out_value,
                                          int32_t *out_lower_bound);

/**
 * Writes `‖f(T(t_i))‖_p` for the decreasing grid `t` into `out_values`
 * (length `n`) and the margin `‖f‖_D - limsup` into `out_margin`.
 *
 * # Safety
 * Handles must be live; `t` and `out_values` must hold `n` doubles.
 */
enum SemilabStatus semilab_beurling_profile(const struct SemilabGenerator *gen,
                                            const struct SemilabPolynomial *poly,
                                            double p,
                                            const double *t,
                                            uintptr_t n,
                                            double *out_values,
                                            double *out_margin);

/**
 * Certified lower bound for the R-bound of `{e^{t_i A}}` in unit-weight
 * `ℓ^p`, exact Rademacher averages, `budget` random selections.
 *
 * # Safety
 * `gen` must be live; `t` must hold `n` doubles; `out_value` writable.
 */
enum SemilabStatus semilab_rbound_estimate(const struct SemilabGenerator *gen,
                                           const double *t,
                                           uintptr_t n,
                                           double p,
                                           uint64_t seed,
                                           uintptr_t budget,
                                           double *out_value);

/**
 * Runs a CLI experiment (`command` as on the command line, e.g.
 * `"beurling"`) from a JSON config and returns the JSON report in
 * `out_json`, to be released with [`semilab_string_free`].
 *
 * # Safety
 * Strings must be NUL-terminated; `out_json` writable.
 */
enum SemilabStatus semilab_run_json(const char *command, const char *config_json, char **out_json);

/**
 * # Safety
 * `s` must be null or a string returned by this library, not yet freed.
 */
void semilab_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SEMILAB_H */
