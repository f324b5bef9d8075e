#include "chainorder/chainorder.h"

#include <algorithm>
#include <cstring>
#include <exception>
#include <new>
#include <string>
#include <vector>

#include "chainorder/datagen.hpp"
#include "chainorder/error.hpp"
#include "chainorder/evaluation.hpp"
#include "chainorder/io.hpp"
#include "chainorder/oneshot.hpp"
#include "chainorder/ordering.hpp"
#include "chainorder/training.hpp"

using namespace chainorder;

struct co_dataset {
  Dataset data;
};

struct co_model {
  TransitionModel model;
};

namespace {

thread_local std::string g_last_error;
thread_local std::size_t g_failed_step = 0;

co_status to_status(ErrorCode code) {
  return static_cast<co_status>(static_cast<int>(code) + 1);
}

template <class F>
co_status guarded(F&& f) {
  try {
    f();
    g_last_error.clear();
    return CO_OK;
  } catch (const TrainingError& e) {
    g_last_error = e.what();
    g_failed_step = e.step();
    return CO_ERR_TRAINING;
  } catch (const Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return CO_ERR_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return CO_ERR_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) fail(ErrorCode::invalid_argument, what);
}

StateKind to_kind(co_state_kind k) {
  if (k == CO_CONTINUOUS) return StateKind::continuous;
  if (k == CO_BINARY) return StateKind::binary;
  fail(ErrorCode::invalid_argument, "unknown state kind");
}

co_state_kind from_kind(StateKind k) { return k == StateKind::binary ? CO_BINARY : CO_CONTINUOUS; }

Permutation to_perm(const std::size_t* p, std::size_t n) { return Permutation(std::vector<std::size_t>(p, p + n)); }

void check_model_data(const GatedTransitionNet& net, const Dataset& data) {
  if (net.kind() != data.kind()) fail(ErrorCode::kind, "model and dataset state kinds differ");
  if (net.state_dim() != data.dim())
    fail(ErrorCode::dimension, "model state_dim " + std::to_string(net.state_dim()) + " does not match dataset dim " +
                                   std::to_string(data.dim()));
}

const std::size_t kDefaultHidden[] = {32};

}  // namespace

extern "C" {

const char* co_last_error(void) { return g_last_error.c_str(); }

const char* co_status_name(co_status status) {
  if (status == CO_OK) return "ok";
  if (status == CO_ERR_INTERNAL) return "internal";
  if (status >= CO_ERR_INVALID_ARGUMENT && status <= CO_ERR_EPISODE)
    return error_code_name(static_cast<ErrorCode>(static_cast<int>(status) - 1));
  return "unknown";
}

const char* co_version(void) { return "1.0.0"; }

uint64_t co_derive_seed(uint64_t master, const char* stream) { return derive_seed(master, stream ? stream : ""); }

co_status co_dataset_create(co_state_kind kind, size_t dim, size_t n, const double* values, co_dataset** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    require(values != nullptr || n == 0, "values is null");
    require(dim > 0, "dim must be positive");
    Dataset d(to_kind(kind), dim, std::vector<double>(values, values + n * dim));
    *out = new co_dataset{std::move(d)};
  });
}

co_status co_dataset_load(const char* path, co_dataset** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new co_dataset{read_dataset_csv(path)};
  });
}

co_status co_dataset_save(const co_dataset* data, const char* path) {
  return guarded([&] {
    require(data && path, "null argument");
    write_dataset_csv(data->data, path);
  });
}

void co_dataset_free(co_dataset* data) { delete data; }

size_t co_dataset_size(const co_dataset* data) { return data ? data->data.size() : 0; }
size_t co_dataset_dim(const co_dataset* data) { return data ? data->data.dim() : 0; }
co_state_kind co_dataset_kind(const co_dataset* data) {
  return data ? from_kind(data->data.kind()) : CO_CONTINUOUS;
}

co_status co_dataset_values(const co_dataset* data, double* out, size_t len) {
  return guarded([&] {
    require(data && out, "null argument");
    const auto& v = data->data.values();
    if (len < v.size()) fail(ErrorCode::size, "output buffer too small");
    std::copy(v.begin(), v.end(), out);
  });
}

co_status co_dataset_set_truth(co_dataset* data, const size_t* truth, size_t n) {
  return guarded([&] {
    require(data && truth, "null argument");
    data->data.set_truth(to_perm(truth, n));
  });
}

co_status co_dataset_truth(const co_dataset* data, size_t* out, size_t n) {
  return guarded([&] {
    require(data && out, "null argument");
    const auto& t = data->data.truth();
    if (!t) fail(ErrorCode::invalid_argument, "dataset carries no ground-truth order");
    if (n < t->size()) fail(ErrorCode::size, "output buffer too small");
    std::copy(t->begin(), t->end(), out);
  });
}

co_status co_dataset_scale(co_dataset* data, const double* scales, size_t dim) {
  return guarded([&] {
    require(data && scales, "null argument");
    scale_features(data->data, {scales, dim});
  });
}

co_status co_dataset_translate(co_dataset* data, const double* offset, size_t dim) {
  return guarded([&] {
    require(data && offset, "null argument");
    translate(data->data, {offset, dim});
  });
}

co_status co_index_file_write(const char* path, const size_t* indices, size_t n, const char* const* header_keys,
                              const char* const* header_values, size_t header_count) {
  return guarded([&] {
    require(path && (indices || n == 0), "null argument");
    require(header_count == 0 || (header_keys && header_values), "null header arrays");
    std::vector<std::pair<std::string, std::string>> header;
    for (size_t i = 0; i < header_count; ++i) header.emplace_back(header_keys[i], header_values[i]);
    write_index_file(path, {indices, n}, header);
  });
}

co_status co_index_file_read(const char* path, size_t* out, size_t capacity, size_t* count) {
  return guarded([&] {
    require(path && count, "null argument");
    const IndexFile f = read_index_file(path);
    *count = f.indices.size();
    if (!out) return;
    if (capacity < f.indices.size()) fail(ErrorCode::size, "output buffer too small");
    std::copy(f.indices.begin(), f.indices.end(), out);
  });
}

co_status co_index_file_header(const char* path, const char* key, char* out, size_t capacity, int* found) {
  return guarded([&] {
    require(path && key && out && found && capacity > 0, "null argument");
    const IndexFile f = read_index_file(path);
    const auto it = f.header.find(key);
    *found = it != f.header.end();
    out[0] = '\0';
    if (!*found) return;
    if (it->second.size() + 1 > capacity) fail(ErrorCode::size, "output buffer too small");
    std::memcpy(out, it->second.c_str(), it->second.size() + 1);
  });
}

co_status co_gen_rotation(size_t n, double radius, double angular_step, double noise_sd, uint64_t seed,
                          co_dataset** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = new co_dataset{gen_rotation_chain(n, radius, angular_step, noise_sd, seed).states};
  });
}

co_status co_gen_linear(size_t n, size_t dim, const double* a, const double* x0, double noise_sd, uint64_t seed,
                        co_dataset** out) {
  return guarded([&] {
    require(a && x0 && out, "null argument");
    *out = new co_dataset{gen_linear_dynamics(n, {a, dim * dim}, {x0, dim}, noise_sd, seed).states};
  });
}

co_status co_gen_bitflip(size_t n, size_t dim, double flip_prob, uint64_t seed, co_dataset** out) {
  return guarded([&] {
    require(out != nullptr, "out is null");
    *out = new co_dataset{gen_bitflip_chain(n, dim, flip_prob, seed).states};
  });
}

co_status co_shuffle(const co_dataset* ordered, uint64_t seed, co_dataset** out) {
  return guarded([&] {
    require(ordered && out, "null argument");
    LabeledTrajectory traj;
    traj.states = ordered->data;
    traj.states.clear_truth();
    traj.true_order = Permutation::identity(traj.states.size());
    *out = new co_dataset{shuffle_with_truth(traj, seed)};
  });
}

co_status co_model_create(const co_model_spec* spec, uint64_t seed, co_model** out) {
  return guarded([&] {
    require(spec && out, "null argument");
    require(spec->hidden_sizes || spec->num_hidden == 0, "hidden_sizes is null");
    TransitionArchitecture arch;
    arch.kind = to_kind(spec->kind);
    arch.state_dim = spec->state_dim;
    arch.hidden_sizes.assign(spec->hidden_sizes, spec->hidden_sizes + spec->num_hidden);
    arch.dropout_rate = spec->dropout_rate;
    Rng rng(derive_seed(seed, "init"));
    *out = new co_model{TransitionModel{GatedTransitionNet(arch, rng), seed, 0}};
  });
}

co_status co_model_load(const char* path, co_model** out) {
  return guarded([&] {
    require(path && out, "null argument");
    *out = new co_model{load_model(path)};
  });
}

co_status co_model_save(const co_model* model, const char* path) {
  return guarded([&] {
    require(model && path, "null argument");
    save_model(model->model, path);
  });
}

void co_model_free(co_model* model) { delete model; }

size_t co_model_dim(const co_model* model) { return model ? model->model.net.state_dim() : 0; }
co_state_kind co_model_kind(const co_model* model) {
  return model ? from_kind(model->model.net.kind()) : CO_CONTINUOUS;
}
size_t co_model_param_count(const co_model* model) { return model ? model->model.net.param_count() : 0; }

co_status co_model_params(const co_model* model, double* out, size_t len) {
  return guarded([&] {
    require(model && out, "null argument");
    auto p = model->model.net.params();
    if (len < p.size()) fail(ErrorCode::size, "output buffer too small");
    std::copy(p.begin(), p.end(), out);
  });
}

co_status co_model_set_params(co_model* model, const double* params, size_t len) {
  return guarded([&] {
    require(model && params, "null argument");
    if (len != model->model.net.param_count()) fail(ErrorCode::dimension, "parameter count mismatch");
    auto p = model->model.net.mutable_params();
    std::copy(params, params + len, p.begin());
  });
}

co_status co_log_transition(const co_model* model, const double* s, const double* next, size_t dim, double* out) {
  return guarded([&] {
    require(model && s && next && out, "null argument");
    const auto kind = model->model.net.kind();
    *out = log_transition(model->model.net, StateView{{s, dim}, kind}, StateView{{next, dim}, kind});
  });
}

co_status co_sample_next(const co_model* model, const double* s, size_t dim, uint64_t seed, double* out) {
  return guarded([&] {
    require(model && s && out, "null argument");
    Rng rng(seed);
    const State next = sample_next(model->model.net, StateView{{s, dim}, model->model.net.kind()}, rng);
    std::copy(next.values().begin(), next.values().end(), out);
  });
}

void co_train_config_default(co_train_config* config) {
  if (!config) return;
  const TrainConfig d;
  config->batch_size = d.batch_size;
  config->overlap = d.overlap;
  config->refresh_period = d.refresh_period;
  config->total_steps = d.total_steps;
  config->num_starts = d.num_starts;
  config->learning_rate = d.optimizer.learning_rate;
  config->beta1 = d.optimizer.beta1;
  config->beta2 = d.optimizer.beta2;
  config->epsilon = d.optimizer.epsilon;
  config->dropout_rate = d.dropout_rate;
  config->seed = d.seed;
  config->hidden_sizes = kDefaultHidden;
  config->num_hidden = 1;
}

co_status co_train(const co_dataset* data, const co_train_config* config, co_model** model_out,
                   co_train_record* history, size_t history_capacity, size_t* failed_step) {
  g_failed_step = 0;
  const co_status st = guarded([&] {
    require(data && config && model_out, "null argument");
    require(config->hidden_sizes || config->num_hidden == 0, "hidden_sizes is null");
    if (history && history_capacity < config->total_steps) fail(ErrorCode::size, "history buffer too small");
    TrainConfig c;
    c.batch_size = config->batch_size;
    c.overlap = config->overlap;
    c.refresh_period = config->refresh_period;
    c.total_steps = config->total_steps;
    c.num_starts = config->num_starts;
    c.optimizer.learning_rate = config->learning_rate;
    c.optimizer.beta1 = config->beta1;
    c.optimizer.beta2 = config->beta2;
    c.optimizer.epsilon = config->epsilon;
    c.dropout_rate = config->dropout_rate;
    c.seed = config->seed;
    c.hidden_sizes.assign(config->hidden_sizes, config->hidden_sizes + config->num_hidden);
    TrainResult r = train(data->data, c);
    if (history)
      for (size_t i = 0; i < r.history.records.size(); ++i)
        history[i] = {r.history.records[i].step, r.history.records[i].log_likelihood, r.history.records[i].grad_norm};
    *model_out = new co_model{std::move(r.model)};
  });
  if (failed_step) *failed_step = st == CO_ERR_TRAINING ? g_failed_step : 0;
  return st;
}

co_status co_history_write(const char* path, const co_train_record* history, size_t n) {
  return guarded([&] {
    require(path && (history || n == 0), "null argument");
    TrainHistory h;
    for (size_t i = 0; i < n; ++i) h.records.push_back({history[i].step, history[i].log_likelihood, history[i].grad_norm});
    write_history_csv(h, path);
  });
}

co_status co_order(const co_model* model, const co_dataset* data, co_order_method method, size_t num_starts,
                   uint64_t seed, size_t* order, double* log_likelihood) {
  return guarded([&] {
    require(model && data && order, "null argument");
    check_model_data(model->model.net, data->data);
    const std::size_t n = data->data.size();
    if (n == 0) fail(ErrorCode::size, "dataset is empty");
    const TabularScorer scorer = model_scorer(model->model.net, data->data);
    Permutation p;
    switch (method) {
      case CO_ORDER_GREEDY:
        p = greedy_order(scorer);
        break;
      case CO_ORDER_SAMPLED: {
        Rng rng(derive_seed(seed, "order"));
        p = greedy_order_sampled(scorer, num_starts, rng);
        break;
      }
      case CO_ORDER_BRUTE:
        p = brute_force_order(scorer);
        break;
      default:
        fail(ErrorCode::invalid_argument, "unknown order method");
    }
    std::copy(p.begin(), p.end(), order);
    if (log_likelihood) *log_likelihood = n >= 2 ? sequence_log_likelihood(scorer, p) : 0.0;
  });
}

co_status co_sequence_log_likelihood(const co_model* model, const co_dataset* data, const size_t* order, size_t n,
                                     double* out) {
  return guarded([&] {
    require(model && data && order && out, "null argument");
    check_model_data(model->model.net, data->data);
    if (n != data->data.size()) fail(ErrorCode::permutation, "order length does not match the dataset");
    *out = sequence_log_likelihood(model_scorer(model->model.net, data->data), to_perm(order, n));
  });
}

co_status co_nn_order(const co_dataset* data, size_t* order) {
  return guarded([&] {
    require(data && order, "null argument");
    const Metric metric = data->data.kind() == StateKind::binary ? Metric::hamming : Metric::euclidean;
    const Permutation p = nn_order(data->data, std::nullopt, metric);
    std::copy(p.begin(), p.end(), order);
  });
}

co_status co_kendall_tau_b(const size_t* a, const size_t* b, size_t n, double* out) {
  return guarded([&] {
    require(a && b && out, "null argument");
    *out = kendall_tau_b(to_perm(a, n), to_perm(b, n));
  });
}

co_status co_evaluate_order(const size_t* truth, const size_t* recovered, size_t n, co_order_report* out) {
  return guarded([&] {
    require(truth && recovered && out, "null argument");
    const OrderReport r = evaluate_order(to_perm(truth, n), to_perm(recovered, n));
    *out = {r.tau_forward, r.tau_reverse, r.tau_best};
  });
}

co_status co_propagate(const co_model* model, const co_dataset* data, size_t start, size_t steps, int revisit,
                       size_t* sequence, size_t* length, int* truncated) {
  return guarded([&] {
    require(data && sequence && length, "null argument");
    TabularScorer scorer;
    if (model) {
      check_model_data(model->model.net, data->data);
      scorer = model_scorer(model->model.net, data->data);
    } else {
      scorer = distance_scorer(data->data, Metric::euclidean);
    }
    const Propagation p = propagate(scorer, start, steps, revisit != 0);
    std::copy(p.sequence.begin(), p.sequence.end(), sequence);
    *length = p.sequence.size();
    if (truncated) *truncated = p.truncated ? 1 : 0;
  });
}

co_status co_oneshot(const co_model* model, const co_dataset* const* classes, size_t num_classes,
                     const co_oneshot_config* config, co_query_callback callback, void* user, double* mean_accuracy,
                     double* std_accuracy) {
  return guarded([&] {
    require(model && config && (classes || num_classes == 0), "null argument");
    std::vector<Dataset> sets;
    sets.reserve(num_classes);
    for (size_t c = 0; c < num_classes; ++c) {
      require(classes[c] != nullptr, "null class dataset");
      check_model_data(model->model.net, classes[c]->data);
      sets.push_back(classes[c]->data);
    }
    OneShotConfig oc;
    oc.way = config->way;
    oc.queries_per_class = config->queries_per_class;
    oc.chain_length = config->chain_length;
    oc.episodes = config->episodes;
    oc.seed = config->seed;
    const OneShotSummary s = run_oneshot(model->model.net, sets, oc);
    if (callback)
      for (const EpisodeOutcome& e : s.episodes)
        for (size_t q = 0; q < e.episode.queries.size(); ++q)
          callback(user, e.index, e.seed, q, e.result.scores[q].data(), e.episode.way, e.result.predictions[q],
                   e.episode.queries[q].label);
    if (mean_accuracy) *mean_accuracy = s.mean_accuracy;
    if (std_accuracy) *std_accuracy = s.std_accuracy;
  });
}

co_status co_gradcheck(co_state_kind kind, size_t dim, size_t trials, uint64_t seed, int corrupt_gradient,
                       double* max_relative_error) {
  return guarded([&] {
    require(max_relative_error != nullptr, "null argument");
    *max_relative_error = transition_gradcheck(to_kind(kind), dim, trials, seed, corrupt_gradient != 0).max_relative_error;
  });
}

}  // extern "C"
