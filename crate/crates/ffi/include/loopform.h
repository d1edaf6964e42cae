#ifndef LOOPFORM_H
#define LOOPFORM_H

/* Generated by cbindgen from loopform-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Outcome of a library call.
typedef enum LfStatus {
  // The call succeeded.
  LF_STATUS_OK = 0,
  // A computation produced a non-finite value.
  LF_STATUS_NUMERIC = 1,
  // Arguments or input documents were rejected.
  LF_STATUS_INVALID = 2,
  // A required pointer argument was null.
  LF_STATUS_NULL_ARGUMENT = 3,
  // A string argument was not valid UTF-8.
  LF_STATUS_BAD_ENCODING = 4,
  // The library caught an internal panic.
  LF_STATUS_PANIC = 5,
} LfStatus;

// Opaque surface kernel handle.
typedef struct LfKernel LfKernel;

// Opaque matrix Laurent series handle.
typedef struct LfSeries LfSeries;

// Opaque kernel coefficient table handle.
typedef struct LfTable LfTable;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string; never freed.
const char *lf_version(void);

// Message describing the most recent failure on the calling thread, empty
// if there has been none. The pointer stays valid until the next failing
// call on the same thread; do not free it.
const char *lf_last_error(void);

// Build a kernel from its JSON descriptor, e.g. `{"kind":"sphere"}` or
// `{"kind":"torus","tau":[0.0,1.0]}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer; on
// success `*out` owns the handle and must be released with
// [`lf_kernel_free`].
enum LfStatus lf_kernel_from_json(const char *json, struct LfKernel **out);

// Release a kernel handle. Null is ignored.
//
// # Safety
// `kernel` must be null or a pointer previously returned by this library
// and not yet freed.
void lf_kernel_free(struct LfKernel *kernel);

// Build a matrix Laurent series from its JSON document, e.g.
// `{"rank":1,"lead":-1,"coeffs":[[[[1.0,0.0]]]]}`.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer; on
// success `*out` owns the handle and must be released with
// [`lf_series_free`].
enum LfStatus lf_series_from_json(const char *json, struct LfSeries **out);

// Release a series handle. Null is ignored.
//
// # Safety
// `series` must be null or a pointer previously returned by this library
// and not yet freed.
void lf_series_free(struct LfSeries *series);

// Build a coefficient table from its JSON document.
//
// # Safety
// `json` must be a NUL-terminated string and `out` a valid pointer; on
// success `*out` owns the handle and must be released with
// [`lf_table_free`].
enum LfStatus lf_table_from_json(const char *json, struct LfTable **out);

// Release a table handle. Null is ignored.
//
// # Safety
// `table` must be null or a pointer previously returned by this library
// and not yet freed.
void lf_table_free(struct LfTable *table);

// Serialize a table back to JSON. The returned string must be released
// with [`lf_string_free`].
//
// # Safety
// `table` must be a live table handle and `out` a valid pointer.
enum LfStatus lf_table_to_json(const struct LfTable *table, char **out);

// Release a string returned by this library. Null is ignored.
//
// # Safety
// `s` must be null or a string pointer previously returned by this library
// and not yet freed.
void lf_string_free(char *s);

// Extract the coefficient window `[nmin, nmax] x [mmin, mmax]` from a
// kernel by sampling both variables on circles of the given radius.
//
// # Safety
// `kernel` must be a live kernel handle and `out` a valid pointer; on
// success `*out` owns the new table.
enum LfStatus lf_extract(const struct LfKernel *kernel,
                         int32_t nmin,
                         int32_t nmax,
                         int32_t mmin,
                         int32_t mmax,
                         double radius,
                         size_t samples,
                         struct LfTable **out);

// Read one coefficient; indices outside the stored window read as zero.
//
// # Safety
// `table` must be a live table handle; `out_re` and `out_im` must be valid.
enum LfStatus lf_table_get(const struct LfTable *table,
                           int32_t n,
                           int32_t m,
                           double *out_re,
                           double *out_im);

// Pair two cocycles through a coefficient table (the series route).
//
// # Safety
// All handles must be live; `out_re` and `out_im` must be valid.
enum LfStatus lf_pair_series(const struct LfSeries *f1,
                             const struct LfSeries *f2,
                             const struct LfTable *table,
                             double *out_re,
                             double *out_im);

// Pair two cocycles by double contour quadrature against the kernel.
//
// # Safety
// All handles must be live; `out_re` and `out_im` must be valid.
enum LfStatus lf_pair_quadrature(const struct LfSeries *f1,
                                 const struct LfSeries *f2,
                                 const struct LfKernel *kernel,
                                 size_t nodes,
                                 double radius,
                                 double *out_re,
                                 double *out_im);

// Double contour moment of the monomial pair `(z^n t^m, z^r t^l)`.
//
// # Safety
// `out_re` and `out_im` must be valid pointers.
enum LfStatus lf_moment(int32_t n,
                        int32_t m,
                        int32_t r,
                        int32_t l,
                        size_t nodes,
                        double *out_re,
                        double *out_im);

#ifdef __cplusplus
} // extern "C"
#endif // __cplusplus

#endif /* LOOPFORM_H */
