/* uavsim — deterministic simulator and routing library for UAV-assisted
 * wireless networks. C interface over the C++ core: opaque handles, status
 * codes, and a thread-local last-error message. */
#ifndef UAVSIM_H
#define UAVSIM_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum uavsim_status {
    UAVSIM_OK = 0,
    UAVSIM_ERR_CONFIG = 1,  /* bad key, value, file, or constraint */
    UAVSIM_ERR_RUN = 2,     /* a simulation aborted mid-run */
    UAVSIM_ERR_ARGUMENT = 3 /* null handle or out-of-range argument */
} uavsim_status;

typedef struct uavsim_config uavsim_config;
typedef struct uavsim_result uavsim_result;

/* --- configuration ------------------------------------------------------ */

/* All-defaults configuration. */
uavsim_status uavsim_config_create(uavsim_config** out);

/* Parse a flat "key = value" file ('#' comments). Unknown keys are rejected
 * and named in uavsim_last_error(). */
uavsim_status uavsim_config_load(const char* path, uavsim_config** out);

/* Parse config text instead of a file. */
uavsim_status uavsim_config_parse(const char* text, uavsim_config** out);

/* Override one key. */
uavsim_status uavsim_config_set(uavsim_config* config, const char* key,
                                const char* value);

/* Apply UAVSIM_<KEY> environment overrides. */
uavsim_status uavsim_config_apply_env(uavsim_config* config);

/* Render the resolved configuration as loadable text annotated with the
 * origin of every value. Free with uavsim_string_free. */
uavsim_status uavsim_config_render(const uavsim_config* config, char** out_text);

/* Validate all constraints without running. */
uavsim_status uavsim_config_validate(const uavsim_config* config);

void uavsim_config_free(uavsim_config* config);

/* --- simulation --------------------------------------------------------- */

/* One deterministic run. Identical (config, seed) pairs produce identical
 * traces and metrics. */
uavsim_status uavsim_run(const uavsim_config* config, uint64_t seed,
                         uavsim_result** out);

/* The nine evaluation metrics, in a stable order. */
size_t uavsim_metric_count(void);
const char* uavsim_metric_name(size_t index);
uavsim_status uavsim_result_metric(const uavsim_result* result, size_t index,
                                   double* out_value);

/* Line-delimited event trace (time,kind,values...). Free with
 * uavsim_string_free. */
uavsim_status uavsim_result_trace(const uavsim_result* result, char** out_text);

void uavsim_result_free(uavsim_result* result);

/* --- sweeps -------------------------------------------------------------- */

/* Run the configured sweep for axis "ue" or "uav" and write one CSV per
 * metric (header "axis,seed,value") into out_dir. write_traces != 0 also
 * stores trace_<axis>_<seed>.txt per run. Partial outputs are removed when a
 * run aborts. */
uavsim_status uavsim_run_sweep(const uavsim_config* config, const char* axis,
                               const char* out_dir, int write_traces);

/* --- misc ---------------------------------------------------------------- */

void uavsim_string_free(char* text);

/* Message for the most recent failing call on this thread. */
const char* uavsim_last_error(void);

#ifdef __cplusplus
}
#endif

#endif /* UAVSIM_H */
