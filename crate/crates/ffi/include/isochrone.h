#ifndef ISOCHRONE_H
#define ISOCHRONE_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum IsoStatus {
  ISO_STATUS_OK = 0,
  ISO_STATUS_NULL_POINTER = 1,
  ISO_STATUS_INVALID_STRING = 2,
  ISO_STATUS_PARAMETER = 3,
  ISO_STATUS_DOMAIN = 4,
  ISO_STATUS_NO_CONVERGENCE = 5,
  ISO_STATUS_BRACKET_FAILURE = 6,
  ISO_STATUS_UNBOUNDED_SIDE = 7,
  ISO_STATUS_INTEGRATION = 8,
  ISO_STATUS_NON_FINITE = 9,
  ISO_STATUS_PANIC = 10,
} IsoStatus;

/**
 * Opaque involution handle.
 */
typedef struct IsoInvolution IsoInvolution;

/**
 * Opaque potential handle.
 */
typedef struct IsoPotential IsoPotential;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message into `buf` as a
 * NUL-terminated string, truncating to `len - 1` bytes. Returns the full
 * message length in bytes, excluding the terminator. An empty message
 * means the last call succeeded.
 *
 * # Safety
 * `buf` must be null or valid for `len` writable bytes.
 */
size_t iso_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *iso_version(void);

/**
 * Principal branch of the Lambert W function on `[-1/e, ∞)`.
 *
 * # Safety
 * `out` must be valid for a write of one `double`.
 */
enum IsoStatus iso_lambert_w0(double x, double *out);

/**
 * Builds an involution from a family address such as
 * `"stillinger:lambda=1,a=1"`, `"quintic"` or a JSON object.
 *
 * # Safety
 * `address` must be a NUL-terminated string; `out` must be valid for a
 * pointer write. The handle is released with [`iso_involution_free`].
 */
enum IsoStatus iso_involution_from_address(const char *address, struct IsoInvolution **out);

/**
 * Releases an involution handle. Null is ignored.
 *
 * # Safety
 * `h` must be null or a handle not yet freed.
 */
void iso_involution_free(struct IsoInvolution *h);

/**
 * `h(x)`.
 *
 * # Safety
 * `h` must be a live handle; `out` must be valid for a write.
 */
enum IsoStatus iso_involution_eval(const struct IsoInvolution *h, double x, double *out);

/**
 * `h'(x)`, analytic when available.
 *
 * # Safety
 * `h` must be a live handle; `out` must be valid for a write.
 */
enum IsoStatus iso_involution_deriv(const struct IsoInvolution *h, double x, double *out);

/**
 * Open domain `(lo, hi)` of the involution; endpoints may be infinite.
 *
 * # Safety
 * `h` must be a live handle; `lo` and `hi` must be valid for writes.
 */
enum IsoStatus iso_involution_domain(const struct IsoInvolution *h, double *lo, double *hi);

/**
 * Builds the potential `V = ω²(x - h(x))²/8` of a family address. Also
 * accepts `"harmonic"` and `"quartic-control"`.
 *
 * # Safety
 * `address` must be a NUL-terminated string; `out` must be valid for a
 * pointer write. The handle is released with [`iso_potential_free`].
 */
enum IsoStatus iso_potential_from_address(const char *address,
                                          double omega,
                                          struct IsoPotential **out);

/**
 * Builds the potential of an existing involution. `h` stays owned by the
 * caller.
 *
 * # Safety
 * `h` must be a live handle; `out` must be valid for a pointer write.
 */
enum IsoStatus iso_potential_from_involution(const struct IsoInvolution *h,
                                             double omega,
                                             struct IsoPotential **out);

/**
 * Releases a potential handle. Null is ignored.
 *
 * # Safety
 * `p` must be null or a handle not yet freed.
 */
void iso_potential_free(struct IsoPotential *p);

/**
 * `V(x)`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be valid for a write.
 */
enum IsoStatus iso_potential_v(const struct IsoPotential *p, double x, double *out);

/**
 * Force `g(x) = V'(x)`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be valid for a write.
 */
enum IsoStatus iso_potential_g(const struct IsoPotential *p, double x, double *out);

/**
 * `2π/ω`.
 *
 * # Safety
 * `p` must be a live handle; `out` must be valid for a write.
 */
enum IsoStatus iso_potential_expected_period(const struct IsoPotential *p, double *out);

/**
 * Period of the orbit of energy `energy`, by adaptive quadrature.
 *
 * # Safety
 * `p` must be a live handle; `out` must be valid for a write.
 */
enum IsoStatus iso_potential_period_quadrature(const struct IsoPotential *p,
                                               double energy,
                                               double *out);

/**
 * Period of the orbit of energy `energy`, by integrating the equation of
 * motion. `tol <= 0` selects the default tolerance.
 *
 * # Safety
 * `p` must be a live handle; `out` must be valid for a write.
 */
enum IsoStatus iso_potential_period_ode(const struct IsoPotential *p,
                                        double energy,
                                        double tol,
                                        double *out);

/**
 * Normalized residuals of the local derivative identities at the origin.
 * Both are below 1e-4 for isochronous potentials.
 *
 * # Safety
 * `p` must be a live handle; `v4` and `v6` must be valid for writes.
 */
enum IsoStatus iso_potential_necessary_residuals(const struct IsoPotential *p,
                                                 double *v4,
                                                 double *v6);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* ISOCHRONE_H */
