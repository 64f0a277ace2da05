/* C interface to the mdne library: attributed network embedding with a
 * multimodal deep autoencoder.
 *
 * Conventions
 *   - Every fallible call returns mdne_status; MDNE_OK is 0.
 *   - On failure mdne_last_error() describes the problem. The message is
 *     per-thread and stays valid until the next failing call on that thread.
 *   - Handles are opaque. Each *_free accepts NULL. Output handles are only
 *     written on success.
 *   - Strings returned through `const char**` are owned by the handle they
 *     came from and live as long as it does.
 *   - Handles are not internally synchronized; share read-only use only.
 */
#ifndef MDNE_MDNE_H
#define MDNE_MDNE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(MDNE_BUILDING_LIBRARY)
#    define MDNE_API __declspec(dllexport)
#  else
#    define MDNE_API __declspec(dllimport)
#  endif
#else
#  define MDNE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mdne_status {
    MDNE_OK = 0,
    MDNE_ERR_INVALID_ARGUMENT = 1, /* NULL pointer, bad enum, out-of-range index */
    MDNE_ERR_PARSE = 2,            /* malformed data, config, or checkpoint */
    MDNE_ERR_SHAPE = 3,            /* dimension mismatch */
    MDNE_ERR_VALIDATION = 4,       /* value outside its documented domain */
    MDNE_ERR_IO = 5,               /* file could not be read or written */
    MDNE_ERR_TRAINING = 6,         /* loss stayed non-finite after all retries */
    MDNE_ERR_CONTRACT = 7,         /* API misuse detected inside the library */
    MDNE_ERR_INTERNAL = 8          /* anything else, e.g. out of memory */
} mdne_status;

typedef enum mdne_task {
    MDNE_TASK_RECONSTRUCT = 0, /* precision@k over all node pairs */
    MDNE_TASK_LINKPRED = 1,    /* AUC on hidden links; trains on the residual network */
    MDNE_TASK_ATTRPRED = 2,    /* AUC on hidden attribute cells; trains on the residual network */
    MDNE_TASK_CLASSIFY = 3     /* micro/macro-F1 of one-vs-rest logistic regression */
} mdne_task;

typedef struct mdne_config mdne_config;
typedef struct mdne_network mdne_network;
typedef struct mdne_model mdne_model;
typedef struct mdne_embedding mdne_embedding;
typedef struct mdne_report mdne_report;
typedef struct mdne_metrics mdne_metrics;

MDNE_API const char* mdne_version(void);
MDNE_API const char* mdne_last_error(void);
MDNE_API const char* mdne_status_name(mdne_status status);

/* ---- configuration ---------------------------------------------------- */

/* Parses an experiment INI file. Relative paths inside it resolve against the
 * file's directory. */
MDNE_API mdne_status mdne_config_load(const char* path, mdne_config** out);
MDNE_API mdne_status mdne_config_set_seed(mdne_config* config, uint64_t seed);
MDNE_API mdne_status mdne_config_set_threads(mdne_config* config, int threads);
MDNE_API mdne_status mdne_config_set_output_dir(mdne_config* config, const char* dir);
MDNE_API mdne_status mdne_config_output_dir(const mdne_config* config, const char** out);
MDNE_API mdne_status mdne_config_dataset_name(const mdne_config* config, const char** out);
MDNE_API void mdne_config_free(mdne_config* config);

/* ---- data ------------------------------------------------------------- */

/* Loads the network named in the config's [data] section. */
MDNE_API mdne_status mdne_network_load(const mdne_config* config, mdne_network** out);
MDNE_API mdne_status mdne_network_info(const mdne_network* network, size_t* nodes, size_t* attributes,
                                       size_t* edges);
MDNE_API void mdne_network_free(mdne_network* network);

/* ---- training --------------------------------------------------------- */

/* Pretrains and fine-tunes on `network`. Any of the three outputs may be NULL
 * when the caller does not need it. */
MDNE_API mdne_status mdne_train(const mdne_config* config, const mdne_network* network, mdne_model** model,
                                mdne_embedding** embedding, mdne_report** report);

MDNE_API mdne_status mdne_report_iterations(const mdne_report* report, size_t* count);
/* losses[0..4] = first-order, second-order, attribute, regularizer, mixed. */
MDNE_API mdne_status mdne_report_losses(const mdne_report* report, size_t iteration, double losses[5]);
/* "max_iters" or "converged". */
MDNE_API mdne_status mdne_report_stop_reason(const mdne_report* report, const char** out);
MDNE_API mdne_status mdne_report_save_csv(const mdne_report* report, const char* path);
MDNE_API void mdne_report_free(mdne_report* report);

/* ---- models ----------------------------------------------------------- */

MDNE_API mdne_status mdne_model_save(const mdne_model* model, const char* path);
MDNE_API mdne_status mdne_model_load(const char* path, mdne_model** out);
MDNE_API mdne_status mdne_model_dims(const mdne_model* model, size_t* nodes, size_t* attributes,
                                     size_t* embedding_dim);
/* Embeds every node of `network`, which must match the model's n and m. */
MDNE_API mdne_status mdne_model_embed_network(const mdne_model* model, const mdne_network* network,
                                              int threads, mdne_embedding** out);
/* Embeds one node from its structure row (n values) and/or attribute row
 * (m values); pass NULL for a missing modality, which is treated as zeros.
 * Writes embedding_dim values to `out`. */
MDNE_API mdne_status mdne_model_embed_node(const mdne_model* model, const double* structure,
                                           const double* attributes, double* out);
MDNE_API void mdne_model_free(mdne_model* model);

/* ---- embeddings ------------------------------------------------------- */

MDNE_API mdne_status mdne_embedding_save(const mdne_embedding* embedding, const char* path);
MDNE_API mdne_status mdne_embedding_load(const char* path, mdne_embedding** out);
MDNE_API mdne_status mdne_embedding_dims(const mdne_embedding* embedding, size_t* rows, size_t* dim);
MDNE_API mdne_status mdne_embedding_row(const mdne_embedding* embedding, size_t row, double* out);
MDNE_API void mdne_embedding_free(mdne_embedding* embedding);

/* ---- evaluation ------------------------------------------------------- */

/* Accepts "reconstruct", "linkpred", "attrpred", "classify". */
MDNE_API mdne_status mdne_task_parse(const char* name, mdne_task* out);

/* Runs one task. `params` lists the k values (reconstruct) or ratios (other
 * tasks); with param_count 0 the config's [eval] lists are used.
 * reconstruct and classify score `embedding`, which must have one row per
 * node; linkpred and attrpred train on the residual network themselves and
 * require `embedding` to be NULL. Getting this wrong is
 * MDNE_ERR_INVALID_ARGUMENT. */
MDNE_API mdne_status mdne_evaluate(const mdne_config* config, const mdne_network* network,
                                   const mdne_embedding* embedding, mdne_task task, const double* params,
                                   size_t param_count, mdne_metrics** out);

/* Coordinate-wise hyperparameter search over the grid in `grid_path`, each
 * cell scored by `objective` at its first param (or config default). Cells run
 * `threads` at a time. The result table is ranked best first. */
MDNE_API mdne_status mdne_sweep(const mdne_config* config, const mdne_network* network, const char* grid_path,
                                mdne_task objective, const double* params, size_t param_count, int threads,
                                mdne_metrics** out);

MDNE_API mdne_status mdne_metrics_count(const mdne_metrics* metrics, size_t* count);
/* Columns of row `index`; string outputs may be NULL when not wanted. */
MDNE_API mdne_status mdne_metrics_row(const mdne_metrics* metrics, size_t index, const char** task,
                                      const char** metric, double* param, double* value);
/* Full table as CSV text (metrics: task,dataset,param,metric,value,seed;
 * sweeps: rank,cell,<params>,seed,score,error). */
MDNE_API mdne_status mdne_metrics_csv(const mdne_metrics* metrics, const char** out);
MDNE_API void mdne_metrics_free(mdne_metrics* metrics);

#ifdef __cplusplus
}
#endif

#endif /* MDNE_MDNE_H */
