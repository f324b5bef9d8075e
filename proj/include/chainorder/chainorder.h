/*
 * chainorder C API.
 *
 * Every function returns a co_status; CO_OK is zero. On failure a description
 * of the most recent error on the calling thread is available from
 * co_last_error(). Objects are opaque handles created by co_*_create /
 * co_*_load and released with the matching co_*_free. Handles are not
 * thread-safe for mutation; a model may be read from several threads at once.
 *
 * Index arrays (orders, truths) are zero-based size_t. Variable-length
 * outputs follow the two-call pattern: pass NULL to learn the length.
 */
#ifndef CHAINORDER_CHAINORDER_H
#define CHAINORDER_CHAINORDER_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(CHAINORDER_BUILDING)
#define CO_API __declspec(dllexport)
#else
#define CO_API __declspec(dllimport)
#endif
#else
#define CO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum co_status {
  CO_OK = 0,
  CO_ERR_INVALID_ARGUMENT = 1,
  CO_ERR_SHAPE = 2,
  CO_ERR_CACHE = 3,
  CO_ERR_DOMAIN = 4,
  CO_ERR_NUMERIC = 5,
  CO_ERR_KIND = 6,
  CO_ERR_PERMUTATION = 7,
  CO_ERR_SIZE = 8,
  CO_ERR_CONFIG = 9,
  CO_ERR_IO = 10,
  CO_ERR_PARSE = 11,
  CO_ERR_VERSION = 12,
  CO_ERR_DIMENSION = 13,
  CO_ERR_TRAINING = 14,
  CO_ERR_EPISODE = 15,
  CO_ERR_INTERNAL = 99
} co_status;

typedef enum co_state_kind { CO_CONTINUOUS = 0, CO_BINARY = 1 } co_state_kind;

typedef struct co_dataset co_dataset;
typedef struct co_model co_model;

CO_API const char* co_last_error(void);
CO_API const char* co_status_name(co_status status);
CO_API const char* co_version(void);

/* Derives an independent seed for a named stream ("train", "shuffle", ...). */
CO_API uint64_t co_derive_seed(uint64_t master, const char* stream);

/* ---- datasets ---------------------------------------------------------- */

CO_API co_status co_dataset_create(co_state_kind kind, size_t dim, size_t n, const double* values,
                                   co_dataset** out);
CO_API co_status co_dataset_load(const char* path, co_dataset** out);
CO_API co_status co_dataset_save(const co_dataset* data, const char* path);
CO_API void co_dataset_free(co_dataset* data);

CO_API size_t co_dataset_size(const co_dataset* data);
CO_API size_t co_dataset_dim(const co_dataset* data);
CO_API co_state_kind co_dataset_kind(const co_dataset* data);
/* Copies size*dim values row-major into `out` (capacity `len`). */
CO_API co_status co_dataset_values(const co_dataset* data, double* out, size_t len);

CO_API co_status co_dataset_set_truth(co_dataset* data, const size_t* truth, size_t n);
/* CO_ERR_INVALID_ARGUMENT when the dataset carries no truth. */
CO_API co_status co_dataset_truth(const co_dataset* data, size_t* out, size_t n);

CO_API co_status co_dataset_scale(co_dataset* data, const double* scales, size_t dim);
CO_API co_status co_dataset_translate(co_dataset* data, const double* offset, size_t dim);

/* Index files: optional "# key=value" lines, then one index per line. */
CO_API co_status co_index_file_write(const char* path, const size_t* indices, size_t n, const char* const* header_keys,
                                     const char* const* header_values, size_t header_count);
/* Reads indices; with out == NULL only *count is set. */
CO_API co_status co_index_file_read(const char* path, size_t* out, size_t capacity, size_t* count);
/* Value of a "# key=value" header line; writes a NUL-terminated string. */
CO_API co_status co_index_file_header(const char* path, const char* key, char* out, size_t capacity, int* found);

/* ---- synthetic data ---------------------------------------------------- */

/* Ordered trajectories (truth = identity is not attached; see co_shuffle). */
CO_API co_status co_gen_rotation(size_t n, double radius, double angular_step, double noise_sd, uint64_t seed,
                                 co_dataset** out);
/* a: row-major dim x dim; x0: dim. */
CO_API co_status co_gen_linear(size_t n, size_t dim, const double* a, const double* x0, double noise_sd, uint64_t seed,
                               co_dataset** out);
CO_API co_status co_gen_bitflip(size_t n, size_t dim, double flip_prob, uint64_t seed, co_dataset** out);
/* Shuffled copy of an ordered dataset with the restoring order attached as truth. */
CO_API co_status co_shuffle(const co_dataset* ordered, uint64_t seed, co_dataset** out);

/* ---- models ------------------------------------------------------------ */

typedef struct co_model_spec {
  co_state_kind kind;
  size_t state_dim;
  const size_t* hidden_sizes;
  size_t num_hidden;
  double dropout_rate;
} co_model_spec;

CO_API co_status co_model_create(const co_model_spec* spec, uint64_t seed, co_model** out);
CO_API co_status co_model_load(const char* path, co_model** out);
CO_API co_status co_model_save(const co_model* model, const char* path);
CO_API void co_model_free(co_model* model);

CO_API size_t co_model_dim(const co_model* model);
CO_API co_state_kind co_model_kind(const co_model* model);
CO_API size_t co_model_param_count(const co_model* model);
CO_API co_status co_model_params(const co_model* model, double* out, size_t len);
CO_API co_status co_model_set_params(co_model* model, const double* params, size_t len);

/* log T(next | s) with the model in eval mode. */
CO_API co_status co_log_transition(const co_model* model, const double* s, const double* next, size_t dim,
                                   double* out);
CO_API co_status co_sample_next(const co_model* model, const double* s, size_t dim, uint64_t seed, double* out);

/* ---- training ---------------------------------------------------------- */

typedef struct co_train_config {
  size_t batch_size;     /* 0 = whole dataset */
  size_t overlap;
  size_t refresh_period;
  size_t total_steps;
  size_t num_starts;     /* 0 = all starts */
  double learning_rate;
  double beta1;
  double beta2;
  double epsilon;
  double dropout_rate;
  uint64_t seed;
  const size_t* hidden_sizes;
  size_t num_hidden;
} co_train_config;

typedef struct co_train_record {
  size_t step;
  double log_likelihood;
  double grad_norm;
} co_train_record;

/* Fills defaults (hidden_sizes points at static storage). */
CO_API void co_train_config_default(co_train_config* config);

/* Trains a new model. `history` may be NULL; otherwise it must hold
 * total_steps records. On CO_ERR_TRAINING, *failed_step (if non-NULL) is set. */
CO_API co_status co_train(const co_dataset* data, const co_train_config* config, co_model** model_out,
                          co_train_record* history, size_t history_capacity, size_t* failed_step);

CO_API co_status co_history_write(const char* path, const co_train_record* history, size_t n);

/* ---- ordering and evaluation ------------------------------------------- */

typedef enum co_order_method { CO_ORDER_GREEDY = 0, CO_ORDER_SAMPLED = 1, CO_ORDER_BRUTE = 2 } co_order_method;

/* Recovers an order of `data` under the model; `order` holds n entries. */
CO_API co_status co_order(const co_model* model, const co_dataset* data, co_order_method method, size_t num_starts,
                          uint64_t seed, size_t* order, double* log_likelihood);
/* Sequence log-likelihood of a given order under the model. */
CO_API co_status co_sequence_log_likelihood(const co_model* model, const co_dataset* data, const size_t* order,
                                            size_t n, double* out);

/* Euclidean nearest-neighbour chain, best over all starts. */
CO_API co_status co_nn_order(const co_dataset* data, size_t* order);

CO_API co_status co_kendall_tau_b(const size_t* a, const size_t* b, size_t n, double* out);

typedef struct co_order_report {
  double tau_forward;
  double tau_reverse;
  double tau_best;
} co_order_report;

CO_API co_status co_evaluate_order(const size_t* truth, const size_t* recovered, size_t n, co_order_report* out);

/* model == NULL propagates under the Euclidean scorer. `sequence` must hold
 * steps + 1 entries; *length receives the number written. */
CO_API co_status co_propagate(const co_model* model, const co_dataset* data, size_t start, size_t steps, int revisit,
                              size_t* sequence, size_t* length, int* truncated);

/* ---- one-shot classification ------------------------------------------- */

typedef struct co_oneshot_config {
  size_t way;
  size_t queries_per_class;
  size_t chain_length;
  size_t episodes;
  uint64_t seed;
} co_oneshot_config;

/* Called once per query, in episode order. `scores` holds `way` per-class
 * average log-likelihoods. */
typedef void (*co_query_callback)(void* user, size_t episode, uint64_t episode_seed, size_t query,
                                  const double* scores, size_t way, size_t prediction, size_t truth);

CO_API co_status co_oneshot(const co_model* model, const co_dataset* const* classes, size_t num_classes,
                            const co_oneshot_config* config, co_query_callback callback, void* user,
                            double* mean_accuracy, double* std_accuracy);

/* ---- diagnostics ------------------------------------------------------- */

/* Max relative error of the analytic log-transition gradient against central
 * differences over `trials` random models; dim must lie in [1, 8]. */
CO_API co_status co_gradcheck(co_state_kind kind, size_t dim, size_t trials, uint64_t seed, int corrupt_gradient,
                              double* max_relative_error);

#ifdef __cplusplus
}
#endif

#endif /* CHAINORDER_CHAINORDER_H */
