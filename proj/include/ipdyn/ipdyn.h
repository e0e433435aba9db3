#ifndef IPDYN_IPDYN_H
#define IPDYN_IPDYN_H

/* C interface to the inflation-persistence toolkit. All entry points return an
 * ipdyn_status; on failure, ipdyn_last_error() carries a thread-local message
 * describing what went wrong. Handles are opaque and must be released with the
 * matching *_free function. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define IPDYN_API __declspec(dllexport)
#else
#define IPDYN_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ipdyn_status {
  IPDYN_OK = 0,
  IPDYN_ERR_IO = 1,
  IPDYN_ERR_PARSE = 2,
  IPDYN_ERR_INVALID = 3,
  IPDYN_ERR_RANK_DEFICIENT = 4,
  IPDYN_ERR_ESTIMATION = 5,
  IPDYN_ERR_INTERNAL = 6
} ipdyn_status;

IPDYN_API const char* ipdyn_version(void);

/* Message from the most recent failed call on the calling thread; empty string
 * when no call has failed yet. The pointer stays valid until the next failed
 * call on the same thread. */
IPDYN_API const char* ipdyn_last_error(void);

/* ------------------------------------------------------------------ config */

typedef struct ipdyn_config ipdyn_config;

IPDYN_API ipdyn_config* ipdyn_config_new(void);
IPDYN_API ipdyn_status ipdyn_config_load(const char* path, ipdyn_config** out);
IPDYN_API ipdyn_status ipdyn_config_parse(const char* text, ipdyn_config** out);
IPDYN_API ipdyn_status ipdyn_config_set(ipdyn_config* cfg, const char* key, const char* value);
/* Copies the value into buf (NUL-terminated, truncated if needed) and stores
 * the full value length in *out_len. buf may be NULL to query the length.
 * Returns IPDYN_ERR_INVALID when the key is absent. */
IPDYN_API ipdyn_status ipdyn_config_get(const ipdyn_config* cfg, const char* key, char* buf,
                                        size_t buf_size, size_t* out_len);
/* Applies IPDYN_* environment variable overrides (double underscore in the
 * variable name maps to a dot in the key; names are lowercased). */
IPDYN_API ipdyn_status ipdyn_config_apply_env(ipdyn_config* cfg);
IPDYN_API ipdyn_status ipdyn_config_echo(const ipdyn_config* cfg, char* buf, size_t buf_size,
                                         size_t* out_len);
IPDYN_API void ipdyn_config_free(ipdyn_config* cfg);

/* -------------------------------------------------------------- run driver */

/* Runs one subcommand ("describe", "fit", "simulate", "dgp", "indices")
 * against a resolved config; artifacts land in the config's `out` directory. */
IPDYN_API ipdyn_status ipdyn_run(const char* command, const ipdyn_config* cfg);

/* ------------------------------------------------------- data + estimation */

typedef struct ipdyn_panel ipdyn_panel;
typedef struct ipdyn_institutions ipdyn_institutions;
typedef struct ipdyn_fit ipdyn_fit;

/* Loads a long-format panel CSV (header `unit,year,...`) without applying any
 * sample-window restriction. */
IPDYN_API ipdyn_status ipdyn_panel_load(const char* path, ipdyn_panel** out);
IPDYN_API ipdyn_status ipdyn_panel_n_rows(const ipdyn_panel* panel, size_t* out);
IPDYN_API ipdyn_status ipdyn_panel_n_units(const ipdyn_panel* panel, size_t* out);
IPDYN_API void ipdyn_panel_free(ipdyn_panel* panel);

IPDYN_API ipdyn_status ipdyn_institutions_load(const char* path, ipdyn_institutions** out);
IPDYN_API ipdyn_status ipdyn_institutions_count(const ipdyn_institutions* table, size_t* out);
IPDYN_API void ipdyn_institutions_free(ipdyn_institutions* table);

/* Fits one specification. `estimator` is "fe" or "gmm"; the model block
 * (dependent, regressors, interactions, lag limits, ...) is read from the
 * config's model.* keys. `institutions` may be NULL when the specification
 * uses no institutional interactions. */
IPDYN_API ipdyn_status ipdyn_fit_model(const ipdyn_panel* panel,
                                       const ipdyn_institutions* institutions,
                                       const ipdyn_config* cfg, const char* estimator,
                                       ipdyn_fit** out);
IPDYN_API ipdyn_status ipdyn_fit_coefficient_count(const ipdyn_fit* fit, size_t* out);
IPDYN_API ipdyn_status ipdyn_fit_coefficient_name(const ipdyn_fit* fit, size_t index, char* buf,
                                                  size_t buf_size, size_t* out_len);
IPDYN_API ipdyn_status ipdyn_fit_coefficient(const ipdyn_fit* fit, const char* name, double* out);
IPDYN_API ipdyn_status ipdyn_fit_standard_error(const ipdyn_fit* fit, const char* name,
                                                double* out);
/* Diagnostics: "hansen", "ar1", "ar2" (plus "*_onestep" for two-step fits).
 * Either output pointer may be NULL. Returns IPDYN_ERR_INVALID when the fit
 * carries no diagnostic of that name. */
IPDYN_API ipdyn_status ipdyn_fit_diagnostic(const ipdyn_fit* fit, const char* name,
                                            double* statistic, double* p_value);
IPDYN_API ipdyn_status ipdyn_fit_n_obs(const ipdyn_fit* fit, long* out);
IPDYN_API ipdyn_status ipdyn_fit_n_units(const ipdyn_fit* fit, long* out);
IPDYN_API void ipdyn_fit_free(ipdyn_fit* fit);

#ifdef __cplusplus
}
#endif

#endif /* IPDYN_IPDYN_H */
