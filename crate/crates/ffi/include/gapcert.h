/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef GAPCERT_H
#define GAPCERT_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call.
 */
typedef enum GapcertStatus {
  GAPCERT_STATUS_OK = 0,
  GAPCERT_STATUS_NULL_POINTER = 1,
  GAPCERT_STATUS_INVALID_INPUT = 2,
  GAPCERT_STATUS_PARSE_ERROR = 3,
  GAPCERT_STATUS_UNBOUNDED = 4,
  GAPCERT_STATUS_CERTIFICATION_FAILED = 5,
  GAPCERT_STATUS_INTERNAL = 6,
} GapcertStatus;

/**
 * Opaque H-polytope handle.
 */
typedef struct GapcertPolytope GapcertPolytope;

/**
 * Opaque theorem-report handle.
 */
typedef struct GapcertReport GapcertReport;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copy of the calling thread's most recent error message, or null if none.
 * Release with `gapcert_string_free`.
 */
char *gapcert_last_error(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must be null or a pointer obtained from this library and not yet freed.
 */
void gapcert_string_free(char *s);

/**
 * Builds the discarded region E(eta) for `eta` given as `"p/q"`.
 *
 * # Safety
 * `eta` must be a valid C string; `out` must be valid for writes.
 */
enum GapcertStatus gapcert_polytope_build_e(const char *eta, struct GapcertPolytope **out);

/**
 * Parses a polytope from its text H-representation.
 *
 * # Safety
 * `text` must be a valid C string; `out` must be valid for writes.
 */
enum GapcertStatus gapcert_polytope_from_hrep(const char *text, struct GapcertPolytope **out);

/**
 * # Safety
 * `p` must be null or a handle from this library and not yet freed.
 */
void gapcert_polytope_free(struct GapcertPolytope *p);

/**
 * Dimension of the polytope.
 *
 * # Safety
 * `p` must be a live handle; `out` must be valid for writes.
 */
enum GapcertStatus gapcert_polytope_dim(const struct GapcertPolytope *p, size_t *out);

/**
 * Exact volume as a `"p/q"` string, plus its nearest double if
 * `out_approx` is non-null.
 *
 * # Safety
 * `p` must be a live handle; `out_exact` valid for writes; `out_approx`
 * null or valid for writes.
 */
enum GapcertStatus gapcert_polytope_volume(const struct GapcertPolytope *p,
                                           char **out_exact,
                                           double *out_approx);

/**
 * Closed membership test for a point given as `dim` `"p/q"` strings.
 *
 * # Safety
 * `p` must be a live handle; `coords` must point to `dim` valid C strings;
 * `out` must be valid for writes.
 */
enum GapcertStatus gapcert_polytope_contains(const struct GapcertPolytope *p,
                                             const char *const *coords,
                                             size_t dim,
                                             bool *out);

/**
 * Text H-representation, one `a1 ... ad <= b` line per half-space.
 *
 * # Safety
 * `p` must be a live handle; `out` must be valid for writes.
 */
enum GapcertStatus gapcert_polytope_hrep(const struct GapcertPolytope *p, char **out);

/**
 * Certifies an upper bound on c1(eta) to absolute width `tol` and runs the
 * final chain of checks with it.
 *
 * # Safety
 * `eta` and `tol` must be valid C strings; `out` must be valid for writes.
 */
enum GapcertStatus gapcert_report_new(const char *eta, const char *tol, struct GapcertReport **out);

/**
 * # Safety
 * `r` must be null or a handle from this library and not yet freed.
 */
void gapcert_report_free(struct GapcertReport *r);

/**
 * Whether every check in the report passed.
 *
 * # Safety
 * `r` must be a live handle; `out` must be valid for writes.
 */
enum GapcertStatus gapcert_report_passed(const struct GapcertReport *r, bool *out);

/**
 * The report as pretty-printed JSON.
 *
 * # Safety
 * `r` must be a live handle; `out` must be valid for writes.
 */
enum GapcertStatus gapcert_report_json(const struct GapcertReport *r, char **out);

/**
 * Verifies every ledger claim. Writes a JSON array of results and whether
 * all of them passed.
 *
 * # Safety
 * `out_json` and `all_pass` must be valid for writes.
 */
enum GapcertStatus gapcert_thresholds_json(char **out_json, bool *all_pass);

/**
 * Library version, statically allocated; do not free.
 */
const char *gapcert_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GAPCERT_H */
