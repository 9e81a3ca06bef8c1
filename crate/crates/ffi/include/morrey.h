#ifndef MORREY_H
#define MORREY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum MorreySeminorm {
  MORREY_SEMINORM_P1 = 1,
  MORREY_SEMINORM_P2 = 2,
  MORREY_SEMINORM_P3 = 3,
} MorreySeminorm;

typedef enum MorreyStatus {
  MORREY_STATUS_OK = 0,
  MORREY_STATUS_NULL_POINTER = 1,
  // Bad input: parameter out of range, precondition or not a self-map.
  MORREY_STATUS_DOMAIN = 2,
  // Numerical failure: Newton divergence, non-finite values, flow escape.
  MORREY_STATUS_NUMERICAL = 3,
  MORREY_STATUS_UNKNOWN_LABEL = 4,
  MORREY_STATUS_INVALID_UTF8 = 5,
  MORREY_STATUS_INVALID_JSON = 6,
  MORREY_STATUS_PANIC = 7,
} MorreyStatus;

// Opaque analytic function on the disc.
typedef struct MorreyFunction MorreyFunction;

// Opaque semigroup of holomorphic self-maps.
typedef struct MorreySemigroup MorreySemigroup;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. Owned by the
// library and valid until the next call on the same thread.
const char *morrey_last_error_message(void);

// Library version as a static NUL-terminated string.
const char *morrey_version(void);

// Builds a gallery function such as `f_lambda`, `monomial:3` or `poly:1,0.5`.
//
// # Safety
// `label` must be a NUL-terminated string and `out_handle` a valid pointer.
enum MorreyStatus morrey_function_new(const char *label,
                                      double lambda,
                                      struct MorreyFunction **out_handle);

// # Safety
// `f` must come from `morrey_function_new` and not be used afterwards. NULL is ignored.
void morrey_function_free(struct MorreyFunction *f);

// Value and derivative at `re + i·im`.
//
// # Safety
// `f` must be a live handle; output pointers must be valid.
enum MorreyStatus morrey_function_eval(const struct MorreyFunction *f,
                                       double re,
                                       double im,
                                       double *value_re,
                                       double *value_im,
                                       double *deriv_re,
                                       double *deriv_im);

// Seminorm supremum over a dyadic grid: arcs `2^{-k}`, `k = 0..=arc_levels`,
// with `centers` centers each, and radii `1 - 2^{-k}`, `k = 0..=radius_levels`,
// with `angles` angles each. `kind` is a `MorreySeminorm` value.
//
// # Safety
// `f` must be a live handle and `out_value` valid.
enum MorreyStatus morrey_seminorm(const struct MorreyFunction *f,
                                  int32_t kind,
                                  double lambda,
                                  uint32_t arc_levels,
                                  size_t centers,
                                  uint32_t radius_levels,
                                  size_t angles,
                                  double *out_value);

// Builds a gallery semigroup such as `rotation:1`, `dilation`, `affine` or
// `koenigs_lambda:0.5`.
//
// # Safety
// `label` must be a NUL-terminated string and `out_handle` valid.
enum MorreyStatus morrey_semigroup_new(const char *label, struct MorreySemigroup **out_handle);

// # Safety
// `sg` must come from `morrey_semigroup_new` and not be used afterwards. NULL is ignored.
void morrey_semigroup_free(struct MorreySemigroup *sg);

// `φ_t(z)` and `∂φ_t/∂z` at `z = re + i·im`.
//
// # Safety
// `sg` must be a live handle; output pointers must be valid.
enum MorreyStatus morrey_semigroup_flow(const struct MorreySemigroup *sg,
                                        double t,
                                        double re,
                                        double im,
                                        double *value_re,
                                        double *value_im,
                                        double *deriv_re,
                                        double *deriv_im);

// Runs a command described by a JSON `RunConfig` (the same structure the
// command-line tool builds) and returns its report. `out_exit_code` receives
// the tool's exit status; the report is released with `morrey_string_free`.
//
// # Safety
// `config_json` must be a NUL-terminated string; output pointers must be valid.
enum MorreyStatus morrey_run_json(const char *config_json,
                                  char **out_report,
                                  int32_t *out_exit_code);

// # Safety
// `s` must come from this library and not be used afterwards. NULL is ignored.
void morrey_string_free(char *s);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* MORREY_H */
