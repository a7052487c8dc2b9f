/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#ifndef SCATLAB_H
#define SCATLAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result codes of every fallible call.
typedef enum ScatStatus {
  SCAT_STATUS_OK = 0,
  SCAT_STATUS_NULL_POINTER = 1,
  SCAT_STATUS_INVALID_PARAMETER = 2,
  SCAT_STATUS_PRECONDITION = 3,
  SCAT_STATUS_SIZE_MISMATCH = 4,
  // Non-finite values, non-integrable tails, failed contraction or fits.
  SCAT_STATUS_NUMERICAL = 5,
  SCAT_STATUS_CONFIG = 6,
  SCAT_STATUS_FORMAT = 7,
  SCAT_STATUS_IO = 8,
  // A Rust panic was caught at the boundary.
  SCAT_STATUS_PANIC = 9,
} ScatStatus;

// Opaque field handle.
typedef struct ScatField ScatField;

typedef struct ScatNorms {
  double mass;
  double l2;
  double sigma;
  // `½‖∇f‖² + ‖f‖_{p+2}^{p+2}/(p+2)`.
  double energy;
  // `‖f‖_{p+2}^{p+2}`.
  double lp_power;
} ScatNorms;

typedef struct ScatExponents {
  double strauss;
  // `2(2p+1)/(p+2)`.
  double q_unsharp;
  // `NaN` when undefined for `(d, p)`.
  double canonical_q;
  double theta;
  bool mass_subcritical;
  bool scattering_regime;
} ScatExponents;

typedef struct ScatBornInfo {
  double norm;
  double duality_lhs;
  double duality_rhs;
  double duality_gap;
  double tail_fraction;
  double horizon;
} ScatBornInfo;

typedef struct ScatMapInfo {
  double displacement_norm;
  double born_norm;
  double error_norm;
  size_t iterations;
} ScatMapInfo;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or null. The pointer
// stays valid until the next failing call on the same thread.
const char *scat_last_error(void);

// Library version as a static nul-terminated string.
const char *scat_version(void);

// Field on a `d`-dimensional periodic box `[-L/2, L/2)^d` with `n` points
// per axis from `2 n^d` interleaved doubles.
//
// # Safety
// `values` must point to `len` readable doubles and `out` must be writable.
enum ScatStatus scat_field_new(uint32_t d,
                               size_t n,
                               double length,
                               const double *values,
                               size_t len,
                               struct ScatField **out);

// Gaussian `exp(-|x|²/(2w²))` scaled to L² norm `amplitude`, on a grid
// that holds its free evolution up to `horizon`.
//
// # Safety
// `out` must be writable.
enum ScatStatus scat_field_gaussian(uint32_t d,
                                    double width,
                                    double amplitude,
                                    double horizon,
                                    struct ScatField **out);

// Releases a handle; null is ignored.
//
// # Safety
// `f` must come from this library and not be used afterwards.
void scat_field_free(struct ScatField *f);

// Grid of a field.
//
// # Safety
// `f` must be a live handle; output pointers must be writable.
enum ScatStatus scat_field_grid(const struct ScatField *f, uint32_t *d, size_t *n, double *length);

// Number of doubles [`scat_field_values`] writes: `2 n^d`.
//
// # Safety
// `f` must be a live handle or null (returns 0).
size_t scat_field_value_count(const struct ScatField *f);

// Copies interleaved samples into `buf`.
//
// # Safety
// `buf` must hold `len` writable doubles.
enum ScatStatus scat_field_values(const struct ScatField *f, double *buf, size_t len);

// Reads a binary field file.
//
// # Safety
// `path` must be a nul-terminated string; `out` must be writable.
enum ScatStatus scat_field_read(const char *path, struct ScatField **out);

// Writes a binary field file.
//
// # Safety
// `f` must be a live handle; `path` a nul-terminated string.
enum ScatStatus scat_field_write(const struct ScatField *f, const char *path);

// `e^{itΔ}f` as a new handle.
//
// # Safety
// `f` must be a live handle; `out` must be writable.
enum ScatStatus scat_propagate(const struct ScatField *f, double t, struct ScatField **out);

// Norms of a field; `p` enters the energy and the Lebesgue power.
//
// # Safety
// `f` must be a live handle; `out` must be writable.
enum ScatStatus scat_norms(const struct ScatField *f, double p, struct ScatNorms *out);

// Exponent bookkeeping for `(d, p)`.
//
// # Safety
// `out` must be writable.
enum ScatStatus scat_exponents(uint32_t d, double p, struct ScatExponents *out);

// Born term `B(f)` as a new handle, with the duality identity.
//
// # Safety
// `f` must be a live handle; `out` and `info` must be writable.
enum ScatStatus scat_born(const struct ScatField *f,
                          double p,
                          struct ScatField **out,
                          struct ScatBornInfo *info);

// Scattering map `S(f)` as a new handle.
//
// # Safety
// `f` must be a live handle; `out` and `info` must be writable.
enum ScatStatus scat_scatter(const struct ScatField *f,
                             double p,
                             struct ScatField **out,
                             struct ScatMapInfo *info);

// Wave operator `W(f)` as a new handle.
//
// # Safety
// `f` must be a live handle; `out` and `info` must be writable.
enum ScatStatus scat_wave(const struct ScatField *f,
                          double p,
                          struct ScatField **out,
                          struct ScatMapInfo *info);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCATLAB_H */
