#ifndef MGFUSION_MGFUSION_H
#define MGFUSION_MGFUSION_H

#include <stddef.h>

#if defined(MGF_BUILDING_LIBRARY)
#define MGF_API __attribute__((visibility("default")))
#else
#define MGF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes; they double as the CLI exit codes. */
typedef enum mgf_status {
  MGF_OK = 0,
  MGF_ERR_USAGE = 1,    /* bad configuration or arguments */
  MGF_ERR_DATA = 2,     /* unreadable, malformed or inconsistent data */
  MGF_ERR_NUMERIC = 3,  /* non-finite loss, degenerate layer weights */
  MGF_ERR_INTERNAL = 4
} mgf_status;

typedef struct mgf_config mgf_config;
typedef struct mgf_model mgf_model;

typedef void (*mgf_log_fn)(const char* line, void* user);

MGF_API const char* mgf_version(void);

/* Message of the last failure on the calling thread ("" if none). */
MGF_API const char* mgf_last_error(void);

/* Receives progress lines from every command. Pass NULL to silence. */
MGF_API void mgf_set_log_callback(mgf_log_fn fn, void* user);

MGF_API mgf_status mgf_config_create(mgf_config** out);
MGF_API void mgf_config_destroy(mgf_config* cfg);
/* Keys are the CLI flag names without dashes; unknown keys fail. */
MGF_API mgf_status mgf_config_set(mgf_config* cfg, const char* key, const char* value);
MGF_API mgf_status mgf_config_load_file(mgf_config* cfg, const char* path);
/* Number of recognised keys, and the name/help text of key i. */
MGF_API size_t mgf_config_key_count(void);
MGF_API const char* mgf_config_key_name(size_t i);
MGF_API const char* mgf_config_key_help(size_t i);

MGF_API mgf_status mgf_run_synth(const mgf_config* cfg);
MGF_API mgf_status mgf_run_pool(const mgf_config* cfg);
MGF_API mgf_status mgf_run_train(const mgf_config* cfg, double* best_val_ua);
MGF_API mgf_status mgf_run_eval(const mgf_config* cfg, double* ua);
MGF_API mgf_status mgf_run_cv(const mgf_config* cfg, double* aggregate_ua);
MGF_API mgf_status mgf_run_combine(const mgf_config* cfg, double* ua);

MGF_API mgf_status mgf_model_load(const char* path, mgf_model** out);
MGF_API void mgf_model_destroy(mgf_model* model);
MGF_API size_t mgf_model_class_count(const mgf_model* model);
/* Class posterior for one manifest utterance; `posterior` holds
   mgf_model_class_count() values. */
MGF_API mgf_status mgf_model_predict(const mgf_model* model, const char* manifest, const char* utterance_id,
                                     double* posterior, size_t capacity);

#ifdef __cplusplus
}
#endif

#endif
