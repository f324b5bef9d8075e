#include "chainorder/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "chainorder/error.hpp"
#include "chainorder/ordering.hpp"

namespace chainorder {

TrainConfig TrainConfig::resolved(std::size_t dataset_size) const {
  TrainConfig c = *this;
  if (c.batch_size == 0) c.batch_size = dataset_size;
  auto bad = [](const std::string& field, const std::string& why) { fail(ErrorCode::config, field + ": " + why); };
  if (dataset_size < 2) bad("dataset", "training needs at least two instances");
  if (c.batch_size < 2) bad("batch_size", "must be at least 2");
  if (c.batch_size > dataset_size)
    bad("batch_size", std::to_string(c.batch_size) + " exceeds the dataset size " + std::to_string(dataset_size));
  if (c.overlap >= c.batch_size) bad("overlap", "must be smaller than batch_size");
  if (c.refresh_period < 1) bad("refresh_period", "must be at least 1");
  if (c.total_steps < 1) bad("total_steps", "must be at least 1");
  if (c.num_starts > c.batch_size) bad("num_starts", "cannot exceed batch_size");
  if (!(c.optimizer.learning_rate > 0.0)) bad("learning_rate", "must be positive");
  if (!(c.optimizer.beta1 >= 0.0 && c.optimizer.beta1 < 1.0)) bad("beta1", "must lie in [0, 1)");
  if (!(c.optimizer.beta2 >= 0.0 && c.optimizer.beta2 < 1.0)) bad("beta2", "must lie in [0, 1)");
  if (!(c.optimizer.epsilon > 0.0)) bad("epsilon", "must be positive");
  if (!(c.dropout_rate >= 0.0 && c.dropout_rate < 1.0)) bad("dropout_rate", "must lie in [0, 1)");
  if (c.hidden_sizes.empty()) bad("hidden_sizes", "needs at least one layer");
  for (std::size_t h : c.hidden_sizes)
    if (h == 0) bad("hidden_sizes", "layer widths must be positive");
  return c;
}

std::vector<std::size_t> sample_batch(std::size_t dataset_size, std::span<const std::size_t> prev, std::size_t b,
                                      std::size_t b0, Rng& rng) {
  if (b > dataset_size)
    fail(ErrorCode::config, "batch size " + std::to_string(b) + " exceeds the dataset size " +
                                std::to_string(dataset_size));
  if (prev.empty()) b0 = 0;
  if (b0 >= b && b > 0) fail(ErrorCode::config, "overlap must be smaller than the batch size");
  if (prev.size() < b0) fail(ErrorCode::config, "previous batch is smaller than the overlap");

  std::vector<char> excluded(dataset_size, 0);
  for (std::size_t i : prev)
    if (i >= dataset_size) fail(ErrorCode::invalid_argument, "previous batch index out of range");
  const std::size_t fresh = b - b0;
  // Fresh draws skip all of prev when enough instances remain.
  const bool avoid_prev = dataset_size >= prev.size() + fresh && !prev.empty();
  const std::size_t skip = avoid_prev ? prev.size() : b0;
  for (std::size_t i = 0; i < skip; ++i) excluded[prev[i]] = 1;
  std::vector<std::size_t> pool;
  pool.reserve(dataset_size);
  for (std::size_t i = 0; i < dataset_size; ++i)
    if (!excluded[i]) pool.push_back(i);

  for (std::size_t i = 0; i < fresh; ++i) std::swap(pool[i], pool[i + rng.uniform_index(pool.size() - i)]);
  std::vector<std::size_t> batch(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(fresh));
  batch.insert(batch.end(), prev.begin(), prev.begin() + static_cast<std::ptrdiff_t>(b0));
  return batch;
}

double batch_log_likelihood(const GatedTransitionNet& net, const Dataset& data, std::span<const std::size_t> order) {
  if (order.size() < 2) fail(ErrorCode::size, "a trajectory needs at least two instances");
  double total = 0.0;
  for (std::size_t t = 1; t < order.size(); ++t)
    total += log_transition(net, data.state(order[t - 1]), data.state(order[t]));
  return total;
}

namespace {

// Summed gradient of the trajectory log-likelihood; returns the likelihood
// of the (possibly dropout-perturbed) forward passes.
double trajectory_gradient(const GatedTransitionNet& net, const Dataset& data, std::span<const std::size_t> order,
                           std::vector<double>& grad, Rng& dropout_rng) {
  grad.assign(net.param_count(), 0.0);
  const Mode mode = net.architecture().dropout_rate > 0.0 ? Mode::train : Mode::eval;
  double total = 0.0;
  for (std::size_t t = 1; t < order.size(); ++t)
    total += accumulate_log_transition_grad(net, data.state(order[t - 1]), data.state(order[t]), grad, mode,
                                            &dropout_rng);
  return total;
}

void ascend(GatedTransitionNet& net, std::vector<double>& grad, AdamState& adam) {
  for (double& g : grad) g = -g;
  adam_step(net.mutable_params(), grad, adam);
}

}  // namespace

std::vector<double> ascend_fixed_order(GatedTransitionNet& net, const Dataset& data,
                                       std::span<const std::size_t> order, std::size_t steps, AdamHyper hyper,
                                       Rng& dropout_rng) {
  AdamState adam(net.param_count(), hyper);
  std::vector<double> trace{batch_log_likelihood(net, data, order)};
  std::vector<double> grad;
  for (std::size_t k = 0; k < steps; ++k) {
    trajectory_gradient(net, data, order, grad, dropout_rng);
    ascend(net, grad, adam);
    trace.push_back(batch_log_likelihood(net, data, order));
  }
  return trace;
}

TrainHistory train(TransitionModel& model, const Dataset& data, const TrainConfig& raw_config) {
  const TrainConfig config = raw_config.resolved(data.size());
  GatedTransitionNet& net = model.net;
  if (net.kind() != data.kind()) fail(ErrorCode::kind, "dataset kind does not match the model kind");
  if (net.state_dim() != data.dim()) fail(ErrorCode::shape, "dataset dimension does not match the model");

  Rng batch_rng(derive_seed(config.seed, "batch"));
  Rng order_rng(derive_seed(config.seed, "order"));
  Rng dropout_rng(derive_seed(config.seed, "dropout"));
  AdamState adam(net.param_count(), config.optimizer);

  TrainHistory history;
  history.records.reserve(config.total_steps);
  std::vector<std::size_t> batch;
  std::vector<std::size_t> trajectory;
  std::vector<double> grad;
  for (std::size_t k = 1; k <= config.total_steps; ++k) {
    if ((k - 1) % config.refresh_period == 0)
      batch = sample_batch(data.size(), batch, config.batch_size, config.overlap, batch_rng);

    const TabularScorer scorer = model_scorer(net, data, batch);
    const Permutation perm = config.num_starts == 0 || config.num_starts == batch.size()
                                 ? greedy_order(scorer)
                                 : greedy_order_sampled(scorer, config.num_starts, order_rng);
    const double ll = sequence_log_likelihood(scorer, perm);
    if (!std::isfinite(ll)) {
      for (std::size_t t = 1; t < perm.size(); ++t) {
        if (!std::isfinite(scorer.score(perm[t - 1], perm[t]))) {
          const std::size_t from = batch[perm[t - 1]], to = batch[perm[t]];
          throw TrainingError(k, from, to,
                              "non-finite log-likelihood at step " + std::to_string(k) + " on transition " +
                                  std::to_string(from) + " -> " + std::to_string(to));
        }
      }
      throw TrainingError(k, 0, 0, "non-finite log-likelihood at step " + std::to_string(k));
    }

    trajectory.resize(perm.size());
    for (std::size_t t = 0; t < perm.size(); ++t) trajectory[t] = batch[perm[t]];
    trajectory_gradient(net, data, trajectory, grad, dropout_rng);
    const double norm = l2_norm(grad);
    if (!std::isfinite(norm))
      throw TrainingError(k, trajectory.front(), trajectory.back(),
                          "non-finite gradient at step " + std::to_string(k));
    ascend(net, grad, adam);
    history.records.push_back({k, ll, norm});
  }
  model.training_steps += config.total_steps;
  return history;
}

TrainResult train(const Dataset& data, const TrainConfig& raw_config) {
  const TrainConfig config = raw_config.resolved(data.size());
  Rng init_rng(derive_seed(config.seed, "init"));
  TransitionArchitecture arch{data.kind(), data.dim(), config.hidden_sizes, config.dropout_rate};
  TrainResult result{TransitionModel{GatedTransitionNet(arch, init_rng), config.seed, 0}, {}};
  result.history = train(result.model, data, config);
  return result;
}

}  // namespace chainorder
