#ifndef DFRC_HBF_H
#define DFRC_HBF_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum DfrcStatus {
  DFRC_STATUS_OK = 0,
  /**
   * A required pointer argument was null.
   */
  DFRC_STATUS_NULL_ARGUMENT = 1,
  /**
   * A string argument was not valid UTF-8.
   */
  DFRC_STATUS_INVALID_UTF8 = 2,
  /**
   * Unknown preset, malformed TOML, or a configuration that fails validation.
   */
  DFRC_STATUS_INVALID_CONFIG = 3,
  /**
   * A rate threshold stayed unreachable past the grace window.
   */
  DFRC_STATUS_INFEASIBLE_QOS = 4,
  /**
   * NaN or infinity appeared during the iterations.
   */
  DFRC_STATUS_NUMERICAL = 5,
  /**
   * Any other solver failure.
   */
  DFRC_STATUS_SOLVER = 6,
  /**
   * An index was out of range or a caller buffer too small.
   */
  DFRC_STATUS_OUT_OF_RANGE = 7,
  /**
   * The library panicked; the handle arguments should be considered poisoned.
   */
  DFRC_STATUS_PANIC = 8,
} DfrcStatus;

/**
 * Detection task selector.
 */
typedef enum DfrcTask {
  DFRC_TASK_SCAN_DETECT = 0,
  DFRC_TASK_TARGET_TRACKING = 1,
} DfrcTask;

/**
 * Opaque scenario configuration.
 */
typedef struct DfrcConfig DfrcConfig;

/**
 * Opaque solver output.
 */
typedef struct DfrcResult DfrcResult;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null when the last
 * call succeeded. The pointer stays valid until the next library call on the
 * same thread.
 */
const char *dfrc_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *dfrc_version(void);

/**
 * Loads a bundled preset (`desk`, `single_carrier_A`, ...).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be writable.
 */
enum DfrcStatus dfrc_config_from_preset(const char *name, struct DfrcConfig **out);

/**
 * Parses a scenario from TOML text.
 *
 * # Safety
 * `toml` must be a NUL-terminated string; `out` must be writable.
 */
enum DfrcStatus dfrc_config_from_toml(const char *toml, struct DfrcConfig **out);

/**
 * Applies a `key=value` override (dotted keys reach nested tables). The
 * configuration is left untouched when the result fails validation.
 *
 * # Safety
 * `config` must come from this library; `assignment` must be NUL-terminated.
 */
enum DfrcStatus dfrc_config_set(struct DfrcConfig *config, const char *assignment);

/**
 * Sets a uniform rate threshold for every subcarrier and user.
 *
 * # Safety
 * `config` must come from this library.
 */
enum DfrcStatus dfrc_config_set_chi(struct DfrcConfig *config, double chi);

/**
 * # Safety
 * `config` must come from this library.
 */
enum DfrcStatus dfrc_config_set_task(struct DfrcConfig *config, enum DfrcTask task);

/**
 * Releases a configuration; null is ignored.
 *
 * # Safety
 * `config` must come from this library and not be used afterwards.
 */
void dfrc_config_free(struct DfrcConfig *config);

/**
 * Draws the channel from the configured seed and runs the solver.
 *
 * # Safety
 * `config` must come from this library; `out` must be writable.
 */
enum DfrcStatus dfrc_solve(const struct DfrcConfig *config, struct DfrcResult **out);

/**
 * Releases a result; null is ignored.
 *
 * # Safety
 * `result` must come from this library and not be used afterwards.
 */
void dfrc_result_free(struct DfrcResult *result);

/**
 * Array sizes of a result: transmit antennas, RF chains, users, subcarriers.
 *
 * # Safety
 * `result` must come from this library; the outputs must be writable.
 */
enum DfrcStatus dfrc_result_dims(const struct DfrcResult *result,
                                 size_t *m_t,
                                 size_t *n_t,
                                 size_t *users,
                                 size_t *subcarriers);

/**
 * Iteration count, convergence flag (1 when the residual test stopped the
 * run), final task objective, and minimum achieved rate.
 *
 * # Safety
 * `result` must come from this library; the outputs must be writable.
 */
enum DfrcStatus dfrc_result_summary(const struct DfrcResult *result,
                                    size_t *iterations,
                                    int32_t *converged,
                                    double *objective,
                                    double *min_rate);

/**
 * Copies `F_RF` (`M_t x N_t`) into `out`, which must hold `2 M_t N_t` doubles.
 *
 * # Safety
 * `result` must come from this library; `out` must hold `len` doubles.
 */
enum DfrcStatus dfrc_result_analog(const struct DfrcResult *result, double *out, size_t len);

/**
 * Copies `F_k` (`N_t x U`) of subcarrier `k` into `out`, which must hold
 * `2 N_t U` doubles.
 *
 * # Safety
 * `result` must come from this library; `out` must hold `len` doubles.
 */
enum DfrcStatus dfrc_result_digital(const struct DfrcResult *result,
                                    size_t k,
                                    double *out,
                                    size_t len);

/**
 * Achieved rates, `K x U` row-major, into `out` of at least `K U` doubles.
 *
 * # Safety
 * `result` must come from this library; `out` must hold `len` doubles.
 */
enum DfrcStatus dfrc_result_rates(const struct DfrcResult *result, double *out, size_t len);

/**
 * Per-iteration objective trace. Writes `min(len, iterations)` values.
 *
 * # Safety
 * `result` must come from this library; `out` must hold `len` doubles.
 */
enum DfrcStatus dfrc_result_objective_trace(const struct DfrcResult *result,
                                            double *out,
                                            size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* DFRC_HBF_H */
