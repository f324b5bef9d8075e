#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "chainorder/rng.hpp"
#include "chainorder/tensor.hpp"
#include "chainorder/transition.hpp"
#include "chainorder/types.hpp"

namespace chainorder {

struct TrainConfig {
  std::size_t batch_size = 0;      // b; 0 means the whole dataset
  std::size_t overlap = 0;         // b0, instances carried into the next batch
  std::size_t refresh_period = 1;  // t, steps between batch refreshes
  std::size_t total_steps = 1000;
  std::size_t num_starts = 0;      // greedy starts per ordering; 0 means all
  AdamHyper optimizer;
  std::uint64_t seed = 0;
  double dropout_rate = 0.2;
  std::vector<std::size_t> hidden_sizes{32};

  // Throws ErrorCode::config naming the offending field. Resolves
  // batch_size = 0 against the dataset size.
  TrainConfig resolved(std::size_t dataset_size) const;
};

struct TrainRecord {
  std::size_t step = 0;
  double log_likelihood = 0.0;  // batch likelihood under that step's greedy order
  double grad_norm = 0.0;
};

struct TrainHistory {
  std::vector<TrainRecord> records;
};

struct TransitionModel {
  GatedTransitionNet net;
  std::uint64_t seed = 0;
  std::uint64_t training_steps = 0;
};

// Next batch: b - b0 indices drawn without replacement from the instances
// outside `prev` (outside the carried-over b0 when the dataset is too small
// for that), followed by the first b0 entries of `prev`. An empty `prev`
// yields a fresh sample of b.
std::vector<std::size_t> sample_batch(std::size_t dataset_size, std::span<const std::size_t> prev, std::size_t b,
                                      std::size_t b0, Rng& rng);

// Alternates greedy ordering of the current batch with one ADAM step on the
// summed log-likelihood of its n-1 transitions.
struct TrainResult {
  TransitionModel model;
  TrainHistory history;
};

TrainResult train(const Dataset& data, const TrainConfig& config);

// Continues training an existing model in place.
TrainHistory train(TransitionModel& model, const Dataset& data, const TrainConfig& config);

// Log-likelihood of the instances in `order` as one trajectory (eval mode).
double batch_log_likelihood(const GatedTransitionNet& net, const Dataset& data, std::span<const std::size_t> order);

// ADAM ascent on a fixed trajectory; returns the likelihood before the first
// step followed by the likelihood after each step.
std::vector<double> ascend_fixed_order(GatedTransitionNet& net, const Dataset& data,
                                       std::span<const std::size_t> order, std::size_t steps, AdamHyper hyper,
                                       Rng& dropout_rng);

inline constexpr int kModelFormatVersion = 1;

void save_model(const TransitionModel& model, const std::filesystem::path& path);
TransitionModel load_model(const std::filesystem::path& path);

}  // namespace chainorder
