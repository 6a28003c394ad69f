#ifndef PERCOR_H
#define PERCOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum PercorStatus {
  PERCOR_STATUS_OK = 0,
  PERCOR_STATUS_NULL_POINTER = 1,
  PERCOR_STATUS_INVALID_ARGUMENT = 2,
  // collinear corners, singular system, zero-area input
  PERCOR_STATUS_DEGENERATE = 3,
  // denominator <= 0 at a requested point
  PERCOR_STATUS_BEHIND_PROJECTION = 4,
  // the claims run finished and at least one criterion failed
  PERCOR_STATUS_CLAIMS_FAILED = 5,
  PERCOR_STATUS_PANIC = 6,
} PercorStatus;

// Opaque screen-to-texture map.
typedef struct PercorMap PercorMap;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *percor_last_error(void);

// Static name of a status code.
const char *percor_status_str(enum PercorStatus status);

// Map from the nine coefficients `a b c d e f g h i` in row order.
//
// # Safety
// `coeffs` must point to 9 readable doubles and `out` to a writable
// handle slot. The handle must be released with [`percor_map_free`].
enum PercorStatus percor_map_from_coeffs(const double *coeffs, struct PercorMap **out);

// Map taking screen corners `x0 y0 ... x3 y3` to texture corners
// `u0 v0 ... u3 v3`.
//
// # Safety
// `screen` and `uv` must each point to 8 readable doubles and `out` to a
// writable handle slot.
enum PercorStatus percor_map_from_quad(const double *screen,
                                       const double *uv,
                                       struct PercorMap **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `map` must be null or a handle from `percor_map_from_*` not yet freed.
void percor_map_free(struct PercorMap *map);

// Copies the nine coefficients into `out`.
//
// # Safety
// `map` must be a live handle and `out` must point to 9 writable doubles.
enum PercorStatus percor_map_coeffs(const struct PercorMap *map, double *out);

// Texture coordinates at screen point `(x, y)` by exact division.
//
// # Safety
// `map` must be a live handle; `u` and `v` must be writable.
enum PercorStatus percor_map_uv(const struct PercorMap *map,
                                double x,
                                double y,
                                double *u,
                                double *v);

// Division-free texture coordinates for pixels `xs..=xe` of row `y`,
// quantized to steps of `du`. Writes `xe - xs + 1` values to each of `u`
// and `v`; `len` is their capacity.
//
// # Safety
// `map` must be a live handle; `u` and `v` must point to `len` writable
// doubles.
enum PercorStatus percor_midpoint_row(const struct PercorMap *map,
                                      int64_t y,
                                      int64_t xs,
                                      int64_t xe,
                                      double du,
                                      double *u,
                                      double *v,
                                      size_t len);

// Runs the numeric claims. `threads` of 0 means one. On return
// `failed` (if not null) holds the number of failed criteria; the status
// is `ClaimsFailed` when it is nonzero.
//
// # Safety
// `failed` must be null or writable.
enum PercorStatus percor_claims_run(uint64_t seed, uint32_t threads, uint32_t *failed);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PERCOR_H */
