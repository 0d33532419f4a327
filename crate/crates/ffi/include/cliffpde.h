#ifndef CLIFFPDE_H
#define CLIFFPDE_H

#include <stddef.h>
#include <stdint.h>

typedef enum CpKernelKind {
  CP_KERNEL_KIND_ZONAL = 0,
  CP_KERNEL_KIND_MONOGENIC = 1,
} CpKernelKind;

typedef enum CpStatus {
  CP_STATUS_OK = 0,
  CP_STATUS_NULL_POINTER = 1,
  CP_STATUS_INVALID_UTF8 = 2,
  CP_STATUS_INVALID_ARGUMENT = 3,
  CP_STATUS_PARSE = 4,
  CP_STATUS_MATH = 5,
  CP_STATUS_UNCALIBRATED = 6,
  CP_STATUS_PANIC = 7,
} CpStatus;

/**
 * Opaque multivector with exact rational coefficients.
 */
typedef struct CpMultivector CpMultivector;

typedef struct CpDims {
  size_t dim_hk;
  size_t rank_mk;
  size_t rank_mk_minus_1;
} CpDims;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the most recent failure on this thread, or NULL. The pointer
 * stays valid until the next call into the library on the same thread.
 */
const char *cp_last_error(void);

/**
 * # Safety
 * `s` must be NULL or a string returned by this library, freed at most once.
 */
void cp_string_free(char *s);

/**
 * Parse text such as `"1/2*e{} + -3*e{1,2}"` in the Clifford algebra of dimension `m`.
 *
 * # Safety
 * `text` must be a NUL-terminated string and `out` a valid pointer.
 */
enum CpStatus cp_multivector_parse(const char *text, size_t m, struct CpMultivector **out);

/**
 * # Safety
 * `mv` must be NULL or a handle from this library, freed at most once.
 */
void cp_multivector_free(struct CpMultivector *mv);

/**
 * # Safety
 * `a`, `b` must be live handles and `out` a valid pointer.
 */
enum CpStatus cp_multivector_product(const struct CpMultivector *a,
                                     const struct CpMultivector *b,
                                     struct CpMultivector **out);

/**
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum CpStatus cp_multivector_reversion(const struct CpMultivector *a, struct CpMultivector **out);

/**
 * # Safety
 * `a` must be a live handle and `out` a valid pointer.
 */
enum CpStatus cp_multivector_to_string(const struct CpMultivector *a, char **out);

/**
 * # Safety
 * `out` must be a valid pointer.
 */
enum CpStatus cp_dims(size_t m, size_t k, struct CpDims *out);

/**
 * Run a named identity suite (`green-scalar`, `green-clifford`, `self-adjoint`,
 * `stokes`, `connection`, `maxwell`) and return its JSON report.
 * `*passed` is set to 1 when every case passes.
 *
 * # Safety
 * `suite` must be a NUL-terminated string; `out_json` and `passed` valid pointers.
 */
enum CpStatus cp_verify_json(const char *suite,
                             size_t m,
                             size_t k,
                             uint64_t seed,
                             size_t cases,
                             char **out_json,
                             int32_t *passed);

/**
 * Exact reproducing kernel of degree `k` as JSON.
 *
 * # Safety
 * `out_json` must be a valid pointer.
 */
enum CpStatus cp_kernel_json(enum CpKernelKind kind, size_t m, size_t k, char **out_json);

/**
 * Numerically calibrate the fundamental-solution constant for `(m, k)`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum CpStatus cp_calibrate(size_t m, size_t k, double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CLIFFPDE_H */
