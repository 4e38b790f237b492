#ifndef TORSIONLAB_H
#define TORSIONLAB_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Verification checks runnable through [`tl_verify`].
 */
typedef enum TlCheck {
  TL_CHECK_VANISHING = 0,
  TL_CHECK_LEMMA_KAPPA = 1,
  /**
   * Uses `n` as the exponent.
   */
  TL_CHECK_POWER_SUMS = 2,
  /**
   * Uses `parameter` as p.
   */
  TL_CHECK_SMALL_P_TABLE = 3,
  /**
   * Uses `parameter` as m.
   */
  TL_CHECK_PARTIAL_FRACTIONS = 4,
} TlCheck;

/**
 * Surgery families.
 */
typedef enum TlFamily {
  /**
   * p/1 surgery on 4_1.
   */
  TL_FAMILY_FIGURE_EIGHT_P = 0,
  /**
   * 1/q surgery on 4_1.
   */
  TL_FAMILY_FIGURE_EIGHT_Q = 1,
  /**
   * 1/q surgery on 5_2.
   */
  TL_FAMILY_FIVE_TWO_Q = 2,
} TlFamily;

/**
 * Torsion methods.
 */
typedef enum TlMethod {
  TL_METHOD_CLOSED_FORM = 0,
  TL_METHOD_CHAIN_COMPLEX = 1,
  TL_METHOD_BOTH = 2,
} TlMethod;

/**
 * Result codes.
 */
typedef enum TlStatus {
  TL_STATUS_OK = 0,
  TL_STATUS_NULL_POINTER = 1,
  TL_STATUS_INVALID_ARGUMENT = 2,
  TL_STATUS_UNSUPPORTED = 3,
  /**
   * Root finding, reconstruction or a linear-algebra gate failed.
   */
  TL_STATUS_NUMERIC_FAILURE = 4,
  /**
   * An exact-arithmetic precondition failed (divisibility, coprimality).
   */
  TL_STATUS_EXACT_FAILURE = 5,
  TL_STATUS_INDEX_OUT_OF_RANGE = 6,
  /**
   * A check ran and reported failure.
   */
  TL_STATUS_CHECK_FAILED = 7,
  TL_STATUS_PANIC = 8,
} TlStatus;

/**
 * Opaque torsion table.
 */
typedef struct TlTorsionTable TlTorsionTable;

/**
 * Opaque list of variety points.
 */
typedef struct TlVariety TlVariety;

/**
 * One row of a torsion table.  Missing values are NaN with the flag cleared.
 */
typedef struct TlTorsionRow {
  double a_re;
  double a_im;
  bool has_closed_form;
  double closed_form_re;
  double closed_form_im;
  bool has_chain_complex;
  double chain_complex_re;
  double chain_complex_im;
  /**
   * Largest relator residual of the representation (NaN if not built).
   */
  double residual;
  bool irreducible;
} TlTorsionRow;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *tl_version(void);

/**
 * The last error message on this thread, or NULL if the last call succeeded.
 * Free the result with [`tl_string_free`].
 */
char *tl_last_error_message(void);

/**
 * Release a string returned by this library.
 *
 * # Safety
 * `s` must be NULL or a pointer returned by this library and not yet freed.
 */
void tl_string_free(char *s);

/**
 * Closed-form torsion at the eigenvalue `a`.
 *
 * # Safety
 * `out_re` and `out_im` must be valid for writes.
 */
enum TlStatus tl_torsion_closed_form(enum TlFamily family,
                                     int64_t parameter,
                                     double a_re,
                                     double a_im,
                                     double *out_re,
                                     double *out_im);

/**
 * Compute the variety points of a manifold.
 *
 * # Safety
 * `out` must be valid for writes.  On success `*out` owns a handle that must
 * be released with [`tl_variety_free`]; on failure `*out` is set to NULL.
 */
enum TlStatus tl_variety_new(enum TlFamily family, int64_t parameter, struct TlVariety **out);

/**
 * Number of points in a variety handle (0 for NULL).
 *
 * # Safety
 * `h` must be NULL or a live handle from [`tl_variety_new`].
 */
size_t tl_variety_len(const struct TlVariety *h);

/**
 * The `index`-th point.
 *
 * # Safety
 * `h` must be a live handle; `out_re` and `out_im` must be valid for writes.
 */
enum TlStatus tl_variety_point(const struct TlVariety *h,
                               size_t index,
                               double *out_re,
                               double *out_im);

/**
 * Release a variety handle.
 *
 * # Safety
 * `h` must be NULL or a live handle from [`tl_variety_new`], not used afterwards.
 */
void tl_variety_free(struct TlVariety *h);

/**
 * Torsion at every variety point.
 *
 * # Safety
 * `out` must be valid for writes; release the result with [`tl_torsion_table_free`].
 */
enum TlStatus tl_torsion_table_new(enum TlFamily family,
                                   int64_t parameter,
                                   enum TlMethod method,
                                   struct TlTorsionTable **out);

/**
 * Number of rows (0 for NULL).
 *
 * # Safety
 * `h` must be NULL or a live handle.
 */
size_t tl_torsion_table_len(const struct TlTorsionTable *h);

/**
 * Copy the `index`-th row into `out`.
 *
 * # Safety
 * `h` must be a live handle and `out` valid for writes.
 */
enum TlStatus tl_torsion_table_row(const struct TlTorsionTable *h,
                                   size_t index,
                                   struct TlTorsionRow *out);

/**
 * Release a torsion table.
 *
 * # Safety
 * `h` must be NULL or a live handle, not used afterwards.
 */
void tl_torsion_table_free(struct TlTorsionTable *h);

/**
 * Run a check and return its report as a JSON string in `*out_json`
 * (free with [`tl_string_free`]).  Returns `CheckFailed` when the report
 * fails; the JSON is still produced.
 *
 * # Safety
 * `out_json` must be valid for writes.
 */
enum TlStatus tl_verify(enum TlCheck check,
                        enum TlFamily family,
                        int64_t parameter,
                        int64_t n,
                        char **out_json);

/**
 * Parse a knot name ("41", "52") and surgery coefficient ("p/q").
 *
 * # Safety
 * `knot` and `surgery` must be NUL-terminated strings; the out pointers
 * must be valid for writes.
 */
enum TlStatus tl_parse_surgery(const char *knot,
                               const char *surgery,
                               enum TlFamily *out_family,
                               int64_t *out_parameter);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TORSIONLAB_H */
