/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef KKVERIFY_H
#define KKVERIFY_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result of every fallible entry point.
 */
typedef enum KkStatus {
  KK_STATUS_OK = 0,
  KK_STATUS_NULL_POINTER = 1,
  KK_STATUS_INVALID_UTF8 = 2,
  KK_STATUS_PARSE = 3,
  KK_STATUS_EVAL = 4,
  KK_STATUS_SCENARIO = 5,
  KK_STATUS_INVALID_ARGUMENT = 6,
  KK_STATUS_PANIC = 7,
} KkStatus;

/**
 * Parsed expression.
 */
typedef struct KkExpr KkExpr;

/**
 * Verification report.
 */
typedef struct KkReport KkReport;

/**
 * Validated scenario.
 */
typedef struct KkScenario KkScenario;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread, or null after a
 * success. Valid until the next call on the same thread; do not free.
 */
const char *kk_last_error_message(void);

/**
 * Releases a string returned by this library. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void kk_string_free(char *s);

/**
 * Parses and simplifies `text`.
 *
 * # Safety
 * `text` must be a NUL-terminated string; `out` must be writable.
 */
enum KkStatus kk_expr_parse(const char *text, struct KkExpr **out);

/**
 * Releases an expression. Null is ignored.
 *
 * # Safety
 * `e` must come from this library and not have been freed.
 */
void kk_expr_free(struct KkExpr *e);

/**
 * Canonical printed form.
 *
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum KkStatus kk_expr_to_string(const struct KkExpr *e, char **out);

/**
 * Simplified ∂e/∂symbol as a new handle.
 *
 * # Safety
 * `e` must be a live handle, `symbol` NUL-terminated, `out` writable.
 */
enum KkStatus kk_expr_differentiate(const struct KkExpr *e,
                                    const char *symbol,
                                    struct KkExpr **out);

/**
 * Simplified copy as a new handle.
 *
 * # Safety
 * `e` must be a live handle; `out` must be writable.
 */
enum KkStatus kk_expr_simplify(const struct KkExpr *e, struct KkExpr **out);

/**
 * Evaluates at the point `names[i] = values[i]` for `i < len`.
 *
 * # Safety
 * `names` and `values` must each hold `len` entries (either may be null
 * when `len` is 0); `out` must be writable.
 */
enum KkStatus kk_expr_evaluate(const struct KkExpr *e,
                               const char *const *names,
                               const double *values,
                               size_t len,
                               double *out);

/**
 * Loads and validates a scenario file.
 *
 * # Safety
 * `path` must be NUL-terminated; `out` must be writable.
 */
enum KkStatus kk_scenario_load_path(const char *path, struct KkScenario **out);

/**
 * Validates a scenario given as JSON text.
 *
 * # Safety
 * `json` must be NUL-terminated; `out` must be writable.
 */
enum KkStatus kk_scenario_load_str(const char *json, struct KkScenario **out);

/**
 * Replaces the sampling seed.
 *
 * # Safety
 * `s` must be a live handle.
 */
enum KkStatus kk_scenario_set_seed(struct KkScenario *s, uint64_t seed);

/**
 * Releases a scenario. Null is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void kk_scenario_free(struct KkScenario *s);

/**
 * Runs every check. `tolerance_scale` must be finite and positive.
 *
 * # Safety
 * `s` must be a live handle; `out` must be writable.
 */
enum KkStatus kk_report_run(const struct KkScenario *s,
                            double tolerance_scale,
                            struct KkReport **out);

/**
 * Report as JSON, byte-identical to the CLI's `--format json`.
 *
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum KkStatus kk_report_to_json(const struct KkReport *r, char **out);

/**
 * Report as grouped text.
 *
 * # Safety
 * `r` must be a live handle; `out` must be writable.
 */
enum KkStatus kk_report_to_text(const struct KkReport *r, char **out);

/**
 * 0 when nothing failed, 1 otherwise; -1 for a null handle.
 *
 * # Safety
 * `r` must be null or a live handle.
 */
int32_t kk_report_exit_code(const struct KkReport *r);

/**
 * Pass, fail and skip counts. Any out-pointer may be null.
 *
 * # Safety
 * `r` must be a live handle; non-null out-pointers must be writable.
 */
enum KkStatus kk_report_counts(const struct KkReport *r, size_t *pass, size_t *fail, size_t *skip);

/**
 * Releases a report. Null is ignored.
 *
 * # Safety
 * `r` must come from this library and not have been freed.
 */
void kk_report_free(struct KkReport *r);

/**
 * Number of independent parameters of the rotations in `n` dimensions.
 *
 * # Safety
 * `out` must be writable.
 */
enum KkStatus kk_parameter_count(int64_t n, int64_t *out);

/**
 * Smallest nonzero quantized action 2πk. Pass `k = 0` for k = ħ/4π.
 *
 * # Safety
 * `out` must be writable.
 */
enum KkStatus kk_min_action(double hbar, double k, double *out);

/**
 * Classifies `action` as 2πnk within `phase_tol`. Pass `k = 0` for
 * k = ħ/4π. `*quantized` is set either way; `*n` only when quantized.
 *
 * # Safety
 * `n` and `quantized` must be writable.
 */
enum KkStatus kk_quantization_check(double action,
                                    double hbar,
                                    double k,
                                    double phase_tol,
                                    int64_t *n,
                                    bool *quantized);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* KKVERIFY_H */
