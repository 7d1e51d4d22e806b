/* End-to-end exercise of the C interface: list presets, run one, read a
 * column and a diagnostic back, and drive one error path.
 *
 * Build and run from the repository root:
 *
 *   cargo build -p ahpe-ffi --release
 *   cc crates/ahpe-ffi/examples/smoke.c -I crates/ahpe-ffi/include \
 *      target/release/libahpe_ffi.a -lm -lpthread -ldl -o smoke
 *   ./smoke
 *
 * Prints a one-line summary and exits 0 on success, or a distinct nonzero
 * code at the first failing step.
 */

#include <stdio.h>
#include <stdlib.h>
#include <string.h>

#include "ahpe.h"

int main(void) {
    char names[256];
    size_t n = ahpe_preset_names(names, sizeof names);
    if (n == 0 || n >= sizeof names) return 10;

    AhpeExperiment *cfg = NULL;
    if (ahpe_experiment_preset("flat-pair-euclid", &cfg) != AHPE_STATUS_OK) return 11;

    AhpeRun *run = NULL;
    if (ahpe_experiment_run(cfg, &run) != AHPE_STATUS_OK) return 12;
    size_t len = ahpe_run_len(run);
    if (len < 2) return 13;
    double *gaps = malloc(len * sizeof *gaps);
    if (gaps == NULL) return 14;
    if (ahpe_run_column(run, AHPE_COLUMN_F_GAP, gaps, len) != AHPE_STATUS_OK) return 15;
    if (!(gaps[len - 1] < gaps[0])) return 16;
    if (!ahpe_run_stopped_at_target(run)) return 17;

    double worst = 0.0;
    if (ahpe_run_diagnostic(run, AHPE_DIAGNOSTIC_WORST_IPROX_RESIDUAL, &worst) != AHPE_STATUS_OK)
        return 18;
    if (!(worst <= 1e-12)) return 19;

    /* Error path: a bad name must set both the status and the message. */
    AhpeExperiment *bad = NULL;
    if (ahpe_experiment_preset("bogus", &bad) != AHPE_STATUS_VALIDATION) return 20;
    char msg[128];
    ahpe_last_error_message(msg, sizeof msg);
    if (strstr(msg, "unknown preset") == NULL) return 21;

    printf("smoke ok: %zu records, final gap %.3e, worst proximal residual %.3e\n",
           len, gaps[len - 1], worst);
    free(gaps);
    ahpe_run_free(run);
    ahpe_experiment_free(cfg);
    return 0;
}
