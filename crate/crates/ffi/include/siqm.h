/* C interface to the siqm shape-invariant quantum mechanics library. */

#ifndef SIQM_H
#define SIQM_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status code returned by every fallible call.
 */
typedef enum {
  SIQM_STATUS_OK = 0,
  SIQM_STATUS_NULL_POINTER = 1,
  SIQM_STATUS_INVALID_UTF8 = 2,
  SIQM_STATUS_UNKNOWN_ENTRY = 3,
  SIQM_STATUS_CONSTRAINT_VIOLATION = 4,
  /**
   * Pole, non-normalizable state, or unbound level.
   */
  SIQM_STATUS_PHYSICS_ERROR = 5,
  SIQM_STATUS_INVALID_GRID = 6,
  SIQM_STATUS_INVALID_ARGUMENT = 7,
  SIQM_STATUS_INTERNAL_ERROR = 8,
} SiqmStatus;

/**
 * Opaque superpotential handle.
 */
typedef struct SiqmEntry SiqmEntry;

/**
 * Shape-invariance residual summary (see `sicheck`).
 */
typedef struct {
  double spread;
  double inferred_shift;
  double expected_shift;
  bool pass;
} SiqmSiReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Last error message for this thread as a newly-allocated C string, or NULL
 * when the previous call succeeded. Free with [`siqm_string_free`].
 */
char *siqm_last_error_message(void);

/**
 * Free a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a pointer previously returned by
 * [`siqm_last_error_message`], not yet freed.
 */
void siqm_string_free(char *s);

/**
 * Library version as a static NUL-terminated string.
 */
const char *siqm_version(void);

/**
 * Open a catalog entry by name with auxiliary parameter overrides
 * (`param_names[i]` = `param_values[i]`, `n_params` pairs; pass 0 pairs to
 * use entry defaults). On success writes an owned handle to `*out`; release
 * it with [`siqm_entry_free`].
 *
 * # Safety
 * `name` must be a NUL-terminated string; `param_names`/`param_values`
 * must hold `n_params` valid entries (or be NULL when `n_params` is 0);
 * `out` must be a valid pointer.
 */
SiqmStatus siqm_entry_open(const char *name,
                           const char *const *param_names,
                           const double *param_values,
                           uintptr_t n_params,
                           SiqmEntry **out);

/**
 * Release an entry handle (NULL is a no-op).
 *
 * # Safety
 * `entry` must be NULL or a handle from [`siqm_entry_open`], not yet freed.
 */
void siqm_entry_free(SiqmEntry *entry);

/**
 * Evaluate the superpotential at `n` abscissas into `w_out` (length `n`).
 *
 * # Safety
 * `entry` must be a live handle; `xs` and `w_out` must hold `n` elements.
 */
SiqmStatus siqm_entry_eval_w(const SiqmEntry *entry,
                             double a,
                             double hbar,
                             const double *xs,
                             uintptr_t n,
                             double *w_out);

/**
 * Sample the partner potentials on a uniform `n`-point grid over
 * `[xmin, xmax]` into `v_minus_out` / `v_plus_out` (length `n` each; either
 * may be NULL to skip it).
 *
 * # Safety
 * `entry` must be a live handle; non-NULL outputs must hold `n` elements.
 */
SiqmStatus siqm_entry_partner_potentials(const SiqmEntry *entry,
                                         double a,
                                         double hbar,
                                         double xmin,
                                         double xmax,
                                         uintptr_t n,
                                         double *v_minus_out,
                                         double *v_plus_out);

/**
 * Analytic energies `E_n = g(a + n hbar) - g(a)` for `n = 0..n_levels` into
 * `energies_out` (length `n_levels`); the bound-level count goes to
 * `*bound_count_out` when non-NULL.
 *
 * # Safety
 * `entry` must be a live handle; `energies_out` must hold `n_levels`
 * elements when `n_levels > 0`.
 */
SiqmStatus siqm_entry_analytic_spectrum(const SiqmEntry *entry,
                                        double a,
                                        double hbar,
                                        uintptr_t n_levels,
                                        double *energies_out,
                                        uintptr_t *bound_count_out);

/**
 * Shape-invariance residual summary over a uniform grid.
 *
 * # Safety
 * `entry` must be a live handle; `report_out` must be a valid pointer.
 */
SiqmStatus siqm_entry_si_check(const SiqmEntry *entry,
                               double a,
                               double hbar,
                               double xmin,
                               double xmax,
                               uintptr_t n,
                               SiqmSiReport *report_out);

/**
 * Lowest `k` eigenvalues of `H = -hbar^2 d^2/dx^2 + V` for potential
 * samples `v` on a uniform grid (`n` points, spacing `dx`, starting at
 * `xmin`), written ascending into `eigs_out` (length `k`).
 *
 * # Safety
 * `v` must hold `n` elements and `eigs_out` must hold `k`.
 */
SiqmStatus siqm_oracle_lowest(const double *v,
                              uintptr_t n,
                              double xmin,
                              double dx,
                              double hbar,
                              uintptr_t k,
                              double *eigs_out);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* SIQM_H */
