#ifndef EVOKE_EVOKE_H
#define EVOKE_EVOKE_H

/* C interface to the evoke EEG emotion pipeline.
 *
 * Every fallible call returns an evoke_status. On failure a message for the
 * calling thread is available from evoke_last_error() until the next call.
 * Strings handed out through char** parameters are owned by the caller and
 * must be released with evoke_string_free(). Reports are UTF-8 JSON. */

#include <stddef.h>
#include <stdint.h>

#if defined(EVOKE_BUILDING_LIBRARY)
#define EVOKE_API __attribute__((visibility("default")))
#else
#define EVOKE_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum evoke_status {
  EVOKE_OK = 0,
  EVOKE_ERR_INVALID_ARGUMENT = 1,
  EVOKE_ERR_SHAPE = 2,
  EVOKE_ERR_VALIDATION = 3,
  EVOKE_ERR_IO = 4,
  EVOKE_ERR_BAD_MAGIC = 5,
  EVOKE_ERR_TRUNCATED = 6,
  EVOKE_ERR_LENGTH_MISMATCH = 7,
  EVOKE_ERR_UNSUPPORTED = 8,
  EVOKE_ERR_CHECKSUM = 9,
  EVOKE_ERR_ARCHITECTURE = 10,
  EVOKE_ERR_LOOKUP = 11,
  EVOKE_ERR_NUMERIC = 12,
  EVOKE_ERR_FORMAT = 13,
  EVOKE_ERR_CONTRACT = 14,
  EVOKE_ERR_NETWORK = 15,
  EVOKE_ERR_INTERNAL = 99
} evoke_status;

EVOKE_API const char* evoke_version(void);
EVOKE_API const char* evoke_last_error(void);
EVOKE_API const char* evoke_status_name(evoke_status status);
EVOKE_API void evoke_string_free(char* s);

/* ---- models ---------------------------------------------------------- */

typedef struct evoke_model evoke_model;

/* expected_architecture may be NULL ("teacher" or "student" otherwise). */
EVOKE_API evoke_status evoke_model_load(const char* path, const char* expected_architecture,
                                        evoke_model** out);
/* config_json may be NULL for the default configuration. */
EVOKE_API evoke_status evoke_model_create(const char* architecture, const char* config_json,
                                          uint64_t seed, evoke_model** out);
/* metadata_json may be NULL. */
EVOKE_API evoke_status evoke_model_save(const evoke_model* model, const char* path,
                                        const char* metadata_json);
EVOKE_API void evoke_model_free(evoke_model* model);

/* {"architecture","config","params","flops_per_sample","layers","metadata","shapes"} */
EVOKE_API evoke_status evoke_model_info_json(const evoke_model* model, char** out_json);

/* input: batch x 4 x 9 x 9 floats; logits: batch x 3 floats. */
EVOKE_API evoke_status evoke_model_forward(const evoke_model* model, const float* input,
                                           size_t batch, float* logits);

/* ---- emotion mapping ------------------------------------------------- */

typedef struct evoke_mapper evoke_mapper;

/* Either path may be NULL to use the built-in table / avatar manifest. */
EVOKE_API evoke_status evoke_mapper_create(const char* table_path, const char* manifest_path,
                                           evoke_mapper** out);
EVOKE_API void evoke_mapper_free(evoke_mapper* mapper);

/* Writes {"bits":[v,a,d],"emotion":...,"avatar":...}. */
EVOKE_API evoke_status evoke_mapper_lookup(const evoke_mapper* mapper, int valence, int arousal,
                                           int dominance, char** out_json);

/* Plain names; either output may be NULL. */
EVOKE_API evoke_status evoke_mapper_names(const evoke_mapper* mapper, int valence, int arousal,
                                          int dominance, char** out_emotion, char** out_avatar);

/* window: 4 x 9 x 9 floats. Writes {"probs","bits","emotion","avatar"}. */
EVOKE_API evoke_status evoke_classify_window(const evoke_model* model,
                                             const evoke_mapper* mapper, const float* window,
                                             char** out_json);

/* ---- pipeline -------------------------------------------------------- */

typedef struct evoke_train_options {
  double temperature;
  double alpha;
  double learning_rate;
  size_t batch_size;
  size_t epochs;
  size_t folds;
  uint64_t seed;
} evoke_train_options;

EVOKE_API void evoke_train_options_default(evoke_train_options* options);

/* trial_secs <= 0 selects the default length. Writes the manifest summary. */
EVOKE_API evoke_status evoke_synth(const char* out_dir, size_t n_subjects, size_t n_trials,
                                   uint64_t seed, double trial_secs, char** out_json);

/* in: a raw manifest (file or directory) or a single raw container. */
EVOKE_API evoke_status evoke_preprocess(const char* in, const char* out_dir, double window_secs,
                                        double baseline_secs, char** out_json);

/* Cross-validated training; the best fold's model is written to out_ckpt and
 * the fold reports are returned. */
EVOKE_API evoke_status evoke_train_teacher(const char* data, const char* out_ckpt,
                                           const evoke_train_options* options,
                                           char** out_json);
EVOKE_API evoke_status evoke_train_student(const char* data, const char* out_ckpt,
                                           const evoke_train_options* options,
                                           char** out_json);
EVOKE_API evoke_status evoke_distill(const char* teacher_ckpt, const char* data,
                                     const char* out_ckpt, const evoke_train_options* options,
                                     char** out_json);

/* Grid over temperatures x alphas; the remaining options are shared.
 * out_csv may be NULL. */
EVOKE_API evoke_status evoke_sweep(const char* teacher_ckpt, const char* data,
                                   const double* temperatures, size_t n_temperatures,
                                   const double* alphas, size_t n_alphas,
                                   const evoke_train_options* options, char** out_json,
                                   char** out_csv);

/* Evaluates on the validation fold recorded in the checkpoint. */
EVOKE_API evoke_status evoke_eval(const char* ckpt, const char* data, char** out_json);

/* Pretty table for a MetricReport or a training/eval report. */
EVOKE_API evoke_status evoke_format_metrics(const char* report_json, char** out_table);

EVOKE_API evoke_status evoke_bench(const char* ckpt, size_t batch_size, size_t iterations,
                                   size_t warmup, size_t workers, uint64_t seed,
                                   char** out_json);
/* reports: n BenchReport JSON strings. out_table may be NULL. */
EVOKE_API evoke_status evoke_bench_compare(const char* const* reports, size_t n,
                                           char** out_json, char** out_table);

/* ---- inference service ----------------------------------------------- */

typedef struct evoke_server evoke_server;

/* model and mapper must outlive the server. listen is "host:port"; port 0
 * picks a free port. */
EVOKE_API evoke_status evoke_server_start(const evoke_model* model, const evoke_mapper* mapper,
                                          const char* listen, size_t max_connections,
                                          evoke_server** out);
EVOKE_API uint16_t evoke_server_port(const evoke_server* server);
/* Stops accepting and drains in-flight requests. Safe to call twice. */
EVOKE_API evoke_status evoke_server_stop(evoke_server* server);
EVOKE_API void evoke_server_free(evoke_server* server);

#ifdef __cplusplus
}
#endif

#endif /* EVOKE_EVOKE_H */
