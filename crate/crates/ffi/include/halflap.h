#ifndef HALFLAP_H
#define HALFLAP_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Backend selector for `hl_half_laplacian`.
 */
typedef enum HlBackend {
  HL_BACKEND_SPECTRAL = 0,
  HL_BACKEND_SINGULAR_INTEGRAL = 1,
} HlBackend;

/**
 * Result codes shared by every entry point.
 */
typedef enum HlStatus {
  HL_STATUS_OK = 0,
  HL_STATUS_NULL_POINTER = 1,
  HL_STATUS_INVALID_ARGUMENT = 2,
  HL_STATUS_INVALID_GRID = 3,
  HL_STATUS_SIZE_MISMATCH = 4,
  HL_STATUS_NON_FINITE = 5,
  HL_STATUS_TOO_FEW_SAMPLES = 6,
  HL_STATUS_IDENTICALLY_ZERO = 7,
  HL_STATUS_NEAR_SINGULAR_POINT = 8,
  HL_STATUS_NUMERICAL = 9,
  HL_STATUS_IO = 10,
  HL_STATUS_INTERNAL = 11,
  HL_STATUS_PANIC = 12,
} HlStatus;

/**
 * Opaque sampled field.
 */
typedef struct HlField HlField;

/**
 * Result of `hl_fit_decay`.
 */
typedef struct HlDecayFit {
  double prefactor;
  double rate;
  double alpha;
  double r_squared;
  size_t shells_used;
  /**
   * Number of diagnostic warnings attached to the fit.
   */
  size_t warnings;
} HlDecayFit;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or null. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *hl_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *hl_version(void);

/**
 * Wrap `len` samples on the grid `(dim, points, half_extent)`.
 *
 * # Safety
 * `values` must point to `len` readable doubles and `out` to a writable
 * handle slot.
 */
enum HlStatus hl_field_new(size_t dim,
                           size_t points,
                           double half_extent,
                           const double *values,
                           size_t len,
                           struct HlField **out);

/**
 * Sample a named family such as `"lorentzian"` or `"exp_smooth:1.5"`.
 *
 * # Safety
 * `spec` must be a NUL-terminated string and `out` a writable handle slot.
 */
enum HlStatus hl_field_sample(const char *spec,
                              size_t dim,
                              size_t points,
                              double half_extent,
                              struct HlField **out);

/**
 * Number of samples held by `field`, or 0 for a null handle.
 *
 * # Safety
 * `field` must be null or a live handle.
 */
size_t hl_field_len(const struct HlField *field);

/**
 * Copy the samples into `buf`, which must hold exactly `hl_field_len` values.
 *
 * # Safety
 * `field` must be a live handle and `buf` must point to `len` writable doubles.
 */
enum HlStatus hl_field_values(const struct HlField *field, double *buf, size_t len);

/**
 * Release a handle. Null is ignored.
 *
 * # Safety
 * `field` must be null or a handle not yet freed.
 */
void hl_field_free(struct HlField *field);

/**
 * Apply the half-Laplacian. Resolution warnings are not reported here.
 *
 * # Safety
 * `field` must be a live handle and `out` a writable handle slot.
 */
enum HlStatus hl_half_laplacian(const struct HlField *field,
                                enum HlBackend backend,
                                struct HlField **out);

/**
 * Harmonic extension of `field` evaluated at height `y > 0`.
 *
 * # Safety
 * `field` must be a live handle and `out` a writable handle slot.
 */
enum HlStatus hl_extend(const struct HlField *field, double y, struct HlField **out);

/**
 * Dirichlet-to-Neumann map `-d/dy` of the extension at `y = 0`.
 *
 * # Safety
 * `field` must be a live handle and `out` a writable handle slot.
 */
enum HlStatus hl_dtn(const struct HlField *field, struct HlField **out);

/**
 * Fit `sup ~ C exp(-c R^alpha)` to `len` samples.
 *
 * # Safety
 * `radii` and `sups` must point to `len` readable doubles, `out` to a
 * writable `HlDecayFit`.
 */
enum HlStatus hl_fit_decay(const double *radii,
                           const double *sups,
                           size_t len,
                           struct HlDecayFit *out);

/**
 * Ball/half-space map on `dim` coordinates (`dim` is 2 or 3), written to
 * `out`, which may alias `z`.
 *
 * # Safety
 * `z` must point to `dim` readable doubles and `out` to `dim` writable doubles.
 */
enum HlStatus hl_phi_map(const double *z, size_t dim, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* HALFLAP_H */
