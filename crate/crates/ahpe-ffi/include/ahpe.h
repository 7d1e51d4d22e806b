/* C interface to the ahpe experiment harness.
 * Generated from src/lib.rs on every build; do not edit by hand. */

#ifndef AHPE_H
#define AHPE_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status codes returned by every fallible call. `Validation`, `Certificate`
 * (which also covers internal numeric failures), and `Io` carry the same
 * numbers the CLI uses as exit codes; the remaining codes are
 * ABI-boundary problems that cannot arise through the CLI.
 */
typedef enum AhpeStatus {
  AHPE_STATUS_OK = 0,
  AHPE_STATUS_VALIDATION = 1,
  AHPE_STATUS_CERTIFICATE = 2,
  AHPE_STATUS_IO = 3,
  AHPE_STATUS_NULL_POINTER = 4,
  AHPE_STATUS_INVALID_UTF8 = 5,
  AHPE_STATUS_BUFFER_TOO_SMALL = 6,
} AhpeStatus;

/**
 * Per-iteration trace columns, one per CSV column of a written trace.
 */
typedef enum AhpeColumn {
  /**
   * Iteration index (exact for every representable run length).
   */
  AHPE_COLUMN_K = 0,
  /**
   * `f(x_k) - f*`.
   */
  AHPE_COLUMN_F_GAP,
  /**
   * Potential `A_k·(f(x_k) - f*) + B_k·d²(z_k, x*)`.
   */
  AHPE_COLUMN_POTENTIAL,
  /**
   * Aggregated weight `A_k`.
   */
  AHPE_COLUMN_ACC_WEIGHT,
  /**
   * Distance coefficient `B_k`.
   */
  AHPE_COLUMN_DIST_WEIGHT,
  /**
   * Incremental weight `a_k`.
   */
  AHPE_COLUMN_INC_WEIGHT,
  AHPE_COLUMN_THETA,
  AHPE_COLUMN_DELTA,
  AHPE_COLUMN_XI,
  AHPE_COLUMN_DIST_TO_OPT,
  /**
   * `d(w_k, z_k)`.
   */
  AHPE_COLUMN_D_WZ,
  AHPE_COLUMN_IPROX_RESIDUAL,
  AHPE_COLUMN_Y_YPRIME_GAP,
  AHPE_COLUMN_XI_RECURSION_RESIDUAL,
} AhpeColumn;

/**
 * Worst-case run diagnostics, maximized over all iterations.
 */
typedef enum AhpeDiagnostic {
  AHPE_DIAGNOSTIC_WORST_IPROX_RESIDUAL = 0,
  AHPE_DIAGNOSTIC_WORST_POTENTIAL_INCREASE,
  AHPE_DIAGNOSTIC_WORST_POTENTIAL_EXCESS,
  AHPE_DIAGNOSTIC_WORST_Y_GAP_EXCESS,
  AHPE_DIAGNOSTIC_WORST_REBASE_EXCESS,
  AHPE_DIAGNOSTIC_WORST_XI_RESIDUAL,
  AHPE_DIAGNOSTIC_WORST_DOMAIN_VIOLATION,
} AhpeDiagnostic;

/**
 * A parsed and validated experiment description.
 */
typedef struct AhpeExperiment AhpeExperiment;

/**
 * A finished run: the per-iteration trace plus run-level diagnostics.
 */
typedef struct AhpeRun AhpeRun;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Fill `buf` with the calling thread's most recent error message and return
 * its full length. The message persists until the next failing call on the
 * same thread. `buf` may be NULL (with `cap` 0) to query the length alone.
 *
 * # Safety
 * `buf` must be NULL or valid for `cap` writable bytes.
 */
uintptr_t ahpe_last_error_message(char *buf, uintptr_t cap);

/**
 * Fill `buf` with the newline-separated names of the bundled experiment
 * presets (see [`ahpe_experiment_preset`]) and return the full length.
 *
 * # Safety
 * `buf` must be NULL or valid for `cap` writable bytes.
 */
uintptr_t ahpe_preset_names(char *buf, uintptr_t cap);

/**
 * Parse and validate a TOML experiment description. On success, store a new
 * handle in `*out`; the caller must release it with
 * [`ahpe_experiment_free`]. On failure `*out` is untouched.
 *
 * # Safety
 * `text` must be a live NUL-terminated string and `out` a valid pointer.
 */
enum AhpeStatus ahpe_experiment_from_toml(const char *text, struct AhpeExperiment **out);

/**
 * Look up a bundled preset by name (names via [`ahpe_preset_names`]). On
 * success, store a new handle in `*out`; release with
 * [`ahpe_experiment_free`].
 *
 * # Safety
 * `name` must be a live NUL-terminated string and `out` a valid pointer.
 */
enum AhpeStatus ahpe_experiment_preset(const char *name, struct AhpeExperiment **out);

/**
 * Release an experiment handle. NULL is a no-op.
 *
 * # Safety
 * `cfg` must be NULL or a handle from [`ahpe_experiment_from_toml`] /
 * [`ahpe_experiment_preset`] that has not been freed.
 */
void ahpe_experiment_free(struct AhpeExperiment *cfg);

/**
 * Run the experiment to completion (deterministically: equal configurations
 * produce bit-identical runs). On success, store a new run handle in `*out`;
 * the caller must release it with [`ahpe_run_free`].
 *
 * # Safety
 * `cfg` must be a live experiment handle and `out` a valid pointer.
 */
enum AhpeStatus ahpe_experiment_run(const struct AhpeExperiment *cfg, struct AhpeRun **out);

/**
 * Release a run handle. NULL is a no-op.
 *
 * # Safety
 * `run` must be NULL or a handle from [`ahpe_experiment_run`] that has not
 * been freed.
 */
void ahpe_run_free(struct AhpeRun *run);

/**
 * Number of trace records in the run (iterations plus one, or fewer when a
 * gap target stopped it early). Returns 0 for NULL.
 *
 * # Safety
 * `run` must be NULL or a live run handle.
 */
uintptr_t ahpe_run_len(const struct AhpeRun *run);

/**
 * The step size the run actually used (relevant when the config said
 * `"auto"`). Returns NaN for NULL.
 *
 * # Safety
 * `run` must be NULL or a live run handle.
 */
double ahpe_run_lambda(const struct AhpeRun *run);

/**
 * The relative error budget the run actually used. Returns NaN for NULL.
 *
 * # Safety
 * `run` must be NULL or a live run handle.
 */
double ahpe_run_sigma(const struct AhpeRun *run);

/**
 * Final objective gap `f(x_n) - f*`. Returns NaN for NULL or empty runs.
 *
 * # Safety
 * `run` must be NULL or a live run handle.
 */
double ahpe_run_final_gap(const struct AhpeRun *run);

/**
 * Whether the run ended by reaching its configured gap target. Returns
 * false for NULL.
 *
 * # Safety
 * `run` must be NULL or a live run handle.
 */
bool ahpe_run_stopped_at_target(const struct AhpeRun *run);

/**
 * Whether the run used a rule outside the supported theory (the
 * experimental midpoint anchor rule), in which case the potential-based
 * conformance checks were informational only. Returns false for NULL.
 *
 * # Safety
 * `run` must be NULL or a live run handle.
 */
bool ahpe_run_off_theory(const struct AhpeRun *run);

/**
 * Copy one trace column — [`ahpe_run_len`] values, iteration order — into
 * `buf`. `cap` is the buffer's capacity in doubles and must cover the whole
 * column; nothing is written otherwise.
 *
 * # Safety
 * `run` must be a live run handle and `buf` valid for `cap` doubles.
 */
enum AhpeStatus ahpe_run_column(const struct AhpeRun *run,
                                enum AhpeColumn column,
                                double *buf,
                                uintptr_t cap);

/**
 * Read one worst-case diagnostic of the run into `*value`.
 *
 * # Safety
 * `run` must be a live run handle and `value` a valid pointer.
 */
enum AhpeStatus ahpe_run_diagnostic(const struct AhpeRun *run,
                                    enum AhpeDiagnostic which,
                                    double *value);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* AHPE_H */
