#ifndef SKEW_MOTZKIN_H
#define SKEW_MOTZKIN_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum SkmStatus {
  SKM_STATUS_OK = 0,
  SKM_STATUS_NULL_POINTER = 1,
  SKM_STATUS_INVALID_ARGUMENT = 2,
  SKM_STATUS_ORACLE_LIMIT = 3,
  SKM_STATUS_OUT_OF_RANGE = 4,
  SKM_STATUS_INVALID_PATH = 5,
  SKM_STATUS_INTERNAL = 6,
} SkmStatus;

/**
 * Dense DP count table.
 */
typedef struct SkmCountTable SkmCountTable;

/**
 * Seeded uniform sampler.
 */
typedef struct SkmSampler SkmSampler;

/**
 * Integer coefficients of a closed-form series.
 */
typedef struct SkmSeries SkmSeries;

/**
 * Asymptotic constants rounded to double precision.
 */
typedef struct SkmConstants {
  double rho;
  double a0;
  double c;
  double amp;
  double k_diff;
  double k_exp;
  double k_log;
  double k_height;
} SkmConstants;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *skm_version(void);

/**
 * Message for the last failure on this thread, or NULL. The pointer stays
 * valid until the next library call on the same thread.
 */
const char *skm_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void skm_string_free(char *s);

/**
 * Checks a word over `U D F L`. A word with other characters fails with
 * `INVALID_PATH`; otherwise `*out_valid` is set and `*out_violation` holds
 * the index of the first offending step (or `SIZE_MAX` when valid).
 *
 * # Safety
 * `word` must be a NUL-terminated string; the out-pointers must be valid.
 */
enum SkmStatus skm_path_validate(const char *word, bool *out_valid, size_t *out_violation);

/**
 * Number of valid paths of length `n` ending at `level`, by brute force.
 * Lengths above `limit` fail with `ORACLE_LIMIT`.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SkmStatus skm_enumerate_count(size_t n, size_t level, size_t limit, uint64_t *out);

/**
 * Builds a count table for lengths `0..=max_len`. A negative `height_cap`
 * means no cap.
 *
 * # Safety
 * `out` must be a valid pointer; the handle is freed with
 * [`skm_count_table_free`].
 */
enum SkmStatus skm_count_table_new(size_t max_len, int64_t height_cap, struct SkmCountTable **out);

/**
 * # Safety
 * `table` must come from [`skm_count_table_new`] or be NULL.
 */
void skm_count_table_free(struct SkmCountTable *table);

/**
 * Count of paths of length `n` ending at `level`, as a decimal string.
 *
 * # Safety
 * `table` must be a live handle and `out` a valid pointer.
 */
enum SkmStatus skm_count_table_count(const struct SkmCountTable *table,
                                     size_t n,
                                     size_t level,
                                     char **out);

/**
 * Like [`skm_count_table_count`] but as an integer; counts that do not fit
 * fail with `OUT_OF_RANGE`.
 *
 * # Safety
 * `table` must be a live handle and `out` a valid pointer.
 */
enum SkmStatus skm_count_table_count_u64(const struct SkmCountTable *table,
                                         size_t n,
                                         size_t level,
                                         uint64_t *out);

/**
 * Evaluates a named series (`sm`, `total`, `level:J`, `bounded:H`,
 * `layer:X:J`) to `order`.
 *
 * # Safety
 * `name` must be a NUL-terminated string and `out` a valid pointer; the
 * handle is freed with [`skm_series_free`].
 */
enum SkmStatus skm_series_new(const char *name, size_t order, struct SkmSeries **out);

/**
 * # Safety
 * `series` must come from [`skm_series_new`] or be NULL.
 */
void skm_series_free(struct SkmSeries *series);

/**
 * Number of stored coefficients (`order + 1`).
 *
 * # Safety
 * `series` must be a live handle and `out` a valid pointer.
 */
enum SkmStatus skm_series_len(const struct SkmSeries *series, size_t *out);

/**
 * Coefficient of `z^n` as a decimal string.
 *
 * # Safety
 * `series` must be a live handle and `out` a valid pointer.
 */
enum SkmStatus skm_series_coefficient(const struct SkmSeries *series, size_t n, char **out);

/**
 * Sampler over paths of length `n` ending at `level` (negative: any level).
 *
 * # Safety
 * `out` must be a valid pointer; the handle is freed with
 * [`skm_sampler_free`].
 */
enum SkmStatus skm_sampler_new(size_t n, int64_t level, uint64_t seed, struct SkmSampler **out);

/**
 * Next sample as a word over `U D F L`.
 *
 * # Safety
 * `sampler` must be a live handle not used concurrently, and `out` a valid
 * pointer.
 */
enum SkmStatus skm_sampler_next(struct SkmSampler *sampler, char **out);

/**
 * # Safety
 * `sampler` must come from [`skm_sampler_new`] or be NULL.
 */
void skm_sampler_free(struct SkmSampler *sampler);

/**
 * Computes the singularity and height constants at `digits` decimal
 * digits (at least 15) and rounds them to doubles.
 *
 * # Safety
 * `out` must be a valid pointer.
 */
enum SkmStatus skm_asymptotic_constants(uint32_t digits, struct SkmConstants *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* SKEW_MOTZKIN_H */
