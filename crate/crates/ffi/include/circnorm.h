#ifndef CIRCNORM_H
#define CIRCNORM_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status code returned by every fallible function.
typedef enum CnStatus {
  CN_STATUS_OK = 0,
  CN_STATUS_NULL_POINTER = 1,
  CN_STATUS_INVALID_ARGUMENT = 2,
  CN_STATUS_NON_FINITE = 3,
  CN_STATUS_DIMENSION_TOO_LARGE = 4,
  CN_STATUS_NOT_CONVERGED = 5,
  CN_STATUS_BOUNDARY = 6,
  CN_STATUS_PANIC = 7,
} CnStatus;

typedef enum CnVerdict {
  CN_VERDICT_YES = 0,
  CN_VERDICT_NO = 1,
  CN_VERDICT_BOUNDARY = 2,
} CnVerdict;

typedef enum CnFormat {
  CN_FORMAT_CSV = 0,
  CN_FORMAT_JSON = 1,
  CN_FORMAT_MARKDOWN = 2,
} CnFormat;

// Opaque classification report.
typedef struct CnReport CnReport;

// Opaque first row.
typedef struct CnRow CnRow;

// Opaque Monte Carlo table.
typedef struct CnTable CnTable;

typedef struct CnTolerances {
  double tie;
  double gap;
  double positivity;
} CnTolerances;

typedef struct CnComplex {
  double re;
  double im;
} CnComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message for the last failed call on this thread, or null. Valid until the
// next call into the library from the same thread.
const char *cn_last_error_message(void);

struct CnTolerances cn_tolerances_default(void);

// # Safety
// `values` points to `n` doubles; `out` is writable.
enum CnStatus cn_row_new_real(const double *values, size_t n, struct CnRow **out);

// # Safety
// `values` points to `n` complex numbers; `out` is writable.
enum CnStatus cn_row_new_complex(const struct CnComplex *values, size_t n, struct CnRow **out);

// # Safety
// `row` is null or came from `cn_row_new_*` and was not freed before.
void cn_row_free(struct CnRow *row);

// Row length, 0 for a null handle.
//
// # Safety
// `row` is null or a live handle.
size_t cn_row_len(const struct CnRow *row);

// # Safety
// `row` is a live handle, `out` is writable.
enum CnStatus cn_spectral_norm(const struct CnRow *row, double *out);

// Symbol values `c(omega^k)`, `k = 0..n`.
//
// # Safety
// `row` is a live handle, `out` holds `len` elements.
enum CnStatus cn_symbol_values(const struct CnRow *row, struct CnComplex *out, size_t len);

// First row of the Gram circulant `C_x^* C_x`.
//
// # Safety
// `row` is a live handle, `out` holds `len` elements.
enum CnStatus cn_gram_row(const struct CnRow *row, struct CnComplex *out, size_t len);

// First row of `B^m`. When the entries would overflow or underflow, the
// row is divided by `||c||_inf^{2m}` and `*normalized` is set.
//
// # Safety
// `row` is a live handle, `out` holds `len` elements, `normalized` is null
// or writable.
enum CnStatus cn_gram_power(const struct CnRow *row,
                            uint32_t m,
                            struct CnComplex *out,
                            size_t len,
                            bool *normalized);

// First row of `B^m / ||c||_inf^{2m}`.
//
// # Safety
// `row` is a live handle, `out` holds `len` elements.
enum CnStatus cn_normalized_power(const struct CnRow *row,
                                  uint32_t m,
                                  struct CnComplex *out,
                                  size_t len);

// Spectral norm by power iteration on the dense Gram matrix.
//
// # Safety
// `row` is a live handle, `out` is writable.
enum CnStatus cn_dense_norm_oracle(const struct CnRow *row, double *out);

// Classifies a row. `tol` may be null for the defaults; `m_max = 0` skips
// the power search.
//
// # Safety
// `row` is a live handle, `tol` is null or readable, `out` is writable.
enum CnStatus cn_classify(const struct CnRow *row,
                          const struct CnTolerances *tol,
                          uint32_t m_max,
                          struct CnReport **out);

// # Safety
// `report` is null or a handle from `cn_classify` not freed before.
void cn_report_free(struct CnReport *report);

// # Safety
// `report` is a live handle.
enum CnVerdict cn_report_in_cn(const struct CnReport *report);

// # Safety
// `report` is a live handle.
enum CnVerdict cn_report_in_cn_prime(const struct CnReport *report);

// # Safety
// `report` is a live handle.
double cn_report_spectral_norm(const struct CnReport *report);

// # Safety
// `report` is a live handle.
double cn_report_row_sum_abs(const struct CnReport *report);

// # Safety
// `report` is a live handle.
double cn_report_gap_margin(const struct CnReport *report);

// Minimal `m` with `B^m > O`, or 0 when none was found or no search ran.
//
// # Safety
// `report` is a live handle.
uint32_t cn_report_minimal_positive_power(const struct CnReport *report);

// Report as a JSON document; free with `cn_string_free`.
//
// # Safety
// `report` is a live handle, `out` is writable.
enum CnStatus cn_report_to_json(const struct CnReport *report, char **out);

// Minimal `m <= m_max` with `B^m > O`; writes 0 when there is none.
//
// # Safety
// `row` is a live handle, `tol` is null or readable, `out` is writable.
enum CnStatus cn_minimal_positive_power(const struct CnRow *row,
                                        uint32_t m_max,
                                        const struct CnTolerances *tol,
                                        uint32_t *out);

// Whether the row lies in the phase cone. With `linear_adjacency` the pair
// `(n-1, 0)` does not count as adjacent.
//
// # Safety
// `row` is a live handle, `tol` is null or readable, `out` is writable.
enum CnStatus cn_phase_cone(const struct CnRow *row,
                            const struct CnTolerances *tol,
                            bool linear_adjacency,
                            bool *out);

// Monte Carlo table over `dims` with `samples` points per dimension.
//
// # Safety
// `dims` and `powers` point to `n_dims` and `n_powers` elements, `tol` is
// null or readable, `out` is writable.
enum CnStatus cn_table_build(const size_t *dims,
                             size_t n_dims,
                             uint64_t samples,
                             const uint32_t *powers,
                             size_t n_powers,
                             uint64_t seed,
                             const struct CnTolerances *tol,
                             struct CnTable **out);

// Renders a table; free the string with `cn_string_free`.
//
// # Safety
// `table` is a live handle, `out` is writable.
enum CnStatus cn_table_render(const struct CnTable *table, enum CnFormat format, char **out);

// # Safety
// `table` is null or a handle from `cn_table_build` not freed before.
void cn_table_free(struct CnTable *table);

// # Safety
// `s` is null or a string returned by this library, not freed before.
void cn_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* CIRCNORM_H */
