#ifndef SCRAMBLER_H
#define SCRAMBLER_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum ShStatus {
  SH_STATUS_OK = 0,
  SH_STATUS_NULL_POINTER = 1,
  SH_STATUS_SHAPE = 2,
  SH_STATUS_DIMENSION_LIMIT = 3,
  SH_STATUS_ARGUMENT = 4,
  SH_STATUS_NUMERIC = 5,
  SH_STATUS_DEGENERATE = 6,
  SH_STATUS_INTERNAL_CONSISTENCY = 7,
  SH_STATUS_UNSUPPORTED = 8,
  SH_STATUS_VALIDATION = 9,
  SH_STATUS_PARSE = 10,
  SH_STATUS_IO = 11,
  SH_STATUS_PANIC = 12,
} ShStatus;

// Opaque complex matrix.
typedef struct ShMatrix ShMatrix;

// Subsystem dimensions of `U: A⊗B → K⊗L`.
typedef struct ShDims {
  size_t d_a;
  size_t d_b;
  size_t d_k;
  size_t d_l;
} ShDims;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Creates a `rows x cols` matrix from `2·rows·cols` interleaved doubles.
//
// # Safety
// `entries` must point to `2·rows·cols` readable doubles and `out` must be
// writable.
enum ShStatus sh_matrix_new(size_t rows, size_t cols, const double *entries, struct ShMatrix **out);

// Parses a JSON matrix document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` writable.
enum ShStatus sh_matrix_from_json(const char *json, struct ShMatrix **out);

// Releases a handle. Null is ignored.
//
// # Safety
// `m` must be null or a handle from this library that has not been freed.
void sh_matrix_free(struct ShMatrix *m);

// Row count, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t sh_matrix_rows(const struct ShMatrix *m);

// Column count, or 0 for a null handle.
//
// # Safety
// `m` must be null or a live handle.
size_t sh_matrix_cols(const struct ShMatrix *m);

// Copies the entries into `buf` (interleaved, row-major). `len` counts
// doubles and must be at least `2·rows·cols`.
//
// # Safety
// `m` must be a live handle and `buf` writable for `len` doubles.
enum ShStatus sh_matrix_get_entries(const struct ShMatrix *m, double *buf, size_t len);

// Haar-random `dim x dim` unitary from `(master_seed, stream)`.
//
// # Safety
// `out` must be writable.
enum ShStatus sh_haar_unitary(size_t dim,
                              uint64_t master_seed,
                              uint64_t stream,
                              struct ShMatrix **out);

// The rotated operator `U°`.
//
// # Safety
// `u` must be a live handle and `out` writable.
enum ShStatus sh_rotate_pi_half(const struct ShMatrix *u, struct ShDims d, struct ShMatrix **out);

// Fidelity with the maximally entangled probe.
//
// # Safety
// `u` must be a live handle and `out` writable.
enum ShStatus sh_p_me(const struct ShMatrix *u, struct ShDims d, double *out);

// Fidelity with the pretty-good probe.
//
// # Safety
// `u` must be a live handle and `out` writable.
enum ShStatus sh_p_pg(const struct ShMatrix *u, struct ShDims d, double *out);

// Optimized fidelity (fixed-point iteration). `tol ≤ 0` or `max_iters = 0`
// select the defaults. `iterations` may be null.
//
// # Safety
// `u` must be a live handle, `out` writable, `iterations` null or writable.
enum ShStatus sh_p_opt(const struct ShMatrix *u,
                       struct ShDims d,
                       double tol,
                       size_t max_iters,
                       double *out,
                       size_t *iterations);

// Large-dimension Haar mean of the optimized fidelity.
//
// # Safety
// `out` must be writable.
enum ShStatus sh_asym_p_opt(double kappa, size_t d_a, size_t d_k, double *out);

// Gauss hypergeometric `₂F₁(a, b; c; z)` for `z ∈ [0, 1]`.
//
// # Safety
// `out` must be writable.
enum ShStatus sh_hyp2f1(double a, double b, double c, double z, double *out);

// Copies this thread's last error message into `buf` (NUL-terminated,
// truncated to `len − 1` bytes) and returns the full message length in
// bytes. Pass a null `buf` to query the length.
//
// # Safety
// `buf` must be null or writable for `len` bytes.
size_t sh_last_error_message(char *buf, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SCRAMBLER_H */
