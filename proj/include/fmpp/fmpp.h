/* fmpp — local weighted summary statistics for functional marked point
 * patterns. C API of the shared library: opaque handles, integer status
 * codes, UTF-8 strings. Strings returned through out-parameters are
 * allocated by the library and must be released with fmpp_string_free().
 *
 * Unless noted otherwise, functions return FMPP_OK on success; on failure
 * they return a status code and fmpp_last_error() describes the problem
 * (per thread).
 *
 * Configuration is passed as JSON text; see the project README for the
 * schema. An empty string or NULL selects all defaults.
 */
#ifndef FMPP_H
#define FMPP_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  FMPP_OK = 0,
  FMPP_E_INVALID = 1, /* bad input data or configuration */
  FMPP_E_IO = 2,      /* file could not be read or written */
  FMPP_E_INTERNAL = 3
} fmpp_status;

typedef struct fmpp_pattern fmpp_pattern;
typedef struct fmpp_intensity fmpp_intensity;

const char* fmpp_version(void);

/* Message for the most recent failure on the calling thread. */
const char* fmpp_last_error(void);

void fmpp_string_free(char* text);
void fmpp_pattern_free(fmpp_pattern* pattern);
void fmpp_intensity_free(fmpp_intensity* intensity);

/* ---- patterns ------------------------------------------------------- */

fmpp_status fmpp_pattern_read(const char* csv_path, const char* sidecar_path,
                              fmpp_pattern** out);
fmpp_status fmpp_pattern_write(const fmpp_pattern* pattern, const char* csv_path,
                               const char* sidecar_path);
/* Same, with a covariates object embedded in the sidecar (JSON text or NULL). */
fmpp_status fmpp_pattern_write_ex(const fmpp_pattern* pattern, const char* csv_path,
                                  const char* sidecar_path, const char* covariates_json);
/* issues_json receives a JSON array of violations; "[]" when valid. */
fmpp_status fmpp_pattern_validate(const fmpp_pattern* pattern, char** issues_json);
int fmpp_pattern_size(const fmpp_pattern* pattern);
fmpp_status fmpp_pattern_window(const fmpp_pattern* pattern, double* x_min,
                                double* x_max, double* y_min, double* y_max);

/* ---- simulation ------------------------------------------------------ */

/* scenario_json: ScenarioSpec. seed is the RNG seed actually used (callers
 * wanting the spec's embedded seed read it from the JSON first).
 * labels_csv (optional out) receives `index,origin` rows. */
fmpp_status fmpp_simulate_scenario(const char* scenario_json, uint64_t seed,
                                   fmpp_pattern** out, char** labels_csv);

/* ---- catalog ingestion ----------------------------------------------- */

/* resample_to: target waveform grid length, or 0 to keep the native grid.
 * covariates_json (optional out) receives pass-through event columns. */
fmpp_status fmpp_ingest_catalog(const char* events_csv_path,
                                const char* waveforms_csv_path,
                                const char* sidecar_json_path, int resample_to,
                                fmpp_pattern** out, char** covariates_json);

/* ---- intensity ------------------------------------------------------- */

fmpp_status fmpp_intensity_constant(const fmpp_pattern* pattern, fmpp_intensity** out);
fmpp_status fmpp_intensity_kernel(const fmpp_pattern* pattern, double bandwidth,
                                  fmpp_intensity** out);
/* Cronie-van Lieshout selection over the default bandwidth grid.
 * cvl_csv (optional out): `h,cvl` rows. chosen (optional out): the argmin. */
fmpp_status fmpp_intensity_cvl(const fmpp_pattern* pattern, fmpp_intensity** out,
                               char** cvl_csv, double* chosen);
/* Returns the (floored) intensity value; NaN on error. */
double fmpp_intensity_value_at(const fmpp_intensity* intensity, double x, double y);

/* ---- summary statistics ---------------------------------------------- */

/* Local curves for every point: CSV `r,value,point_index`. info_json
 * (optional out) bundles the configuration echo, the resolved bandwidth and
 * whether the isotropic weight cap bound anywhere. */
fmpp_status fmpp_local_k_csv(const fmpp_pattern* pattern, const char* config_json,
                             char** csv, char** info_json);
/* Global curve: CSV `r,value`; info_json as above. */
fmpp_status fmpp_global_k_csv(const fmpp_pattern* pattern, const char* config_json,
                              char** csv, char** info_json);

/* ---- random labelling tests ------------------------------------------ */

/* result_json: p-value, alpha, Q, measure; envelope_csv (optional out):
 * `r,observed,lower,upper`. */
fmpp_status fmpp_global_test(const fmpp_pattern* pattern, const char* config_json,
                             char** result_json, char** envelope_csv);

/* report_json / report_csv: per-point p-values and decisions.
 * envelopes_csv (optional out): per-point envelope dump
 * `point_index,r,observed,lower,upper`. */
fmpp_status fmpp_local_test(const fmpp_pattern* pattern, const char* config_json,
                            char** report_json, char** report_csv,
                            char** envelopes_csv);

/* ---- experiments ------------------------------------------------------ */

/* experiment_json: ExperimentSpec. output_dir: per-replicate results are
 * persisted there and reused on rerun (empty string disables persistence). */
fmpp_status fmpp_run_experiment(const char* experiment_json, const char* output_dir,
                                int threads, char** report_json, char** report_csv);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* FMPP_H */
