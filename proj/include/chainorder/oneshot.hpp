#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "chainorder/rng.hpp"
#include "chainorder/transition.hpp"
#include "chainorder/types.hpp"

namespace chainorder {

struct Query {
  State state;
  std::size_t label = 0;  // index into the episode's classes
};

// One labelled support per class plus labelled queries.
struct Episode {
  std::size_t way = 0;
  std::vector<State> supports;
  std::vector<Query> queries;
  std::size_t chain_length = 5;         // k
  std::vector<std::size_t> source_classes;  // which input class each episode class came from
};

// k states sampled forward from `support`; k = 0 yields an empty chain.
std::vector<State> class_chain(const GatedTransitionNet& net, const State& support, std::size_t k, Rng& rng);

// (log T(q | support) + sum_i log T(q | chain_i)) / (k + 1).
double class_log_likelihood(const GatedTransitionNet& net, const State& support, std::span<const State> chain,
                            const State& query);

struct Classification {
  std::vector<std::size_t> predictions;
  std::vector<std::vector<double>> scores;  // [query][class]
  std::size_t correct = 0;
  std::optional<double> accuracy;           // empty when there are no queries
};

// Draws one chain per class, then labels each query by the class with the
// highest average log-likelihood (ties to the smallest class index).
Classification classify(const GatedTransitionNet& net, const Episode& episode, Rng& rng);

// Argmax with ties to the smallest index.
std::size_t argmax_class(std::span<const double> scores);

// Samples `way` distinct classes, then one support and queries_per_class
// queries per class, all distinct instances within a class.
Episode build_episode(std::span<const Dataset> classes, std::size_t way, std::size_t queries_per_class,
                      std::size_t chain_length, Rng& rng);

struct OneShotConfig {
  std::size_t way = 5;
  std::size_t queries_per_class = 5;
  std::size_t chain_length = 5;
  std::size_t episodes = 100;
  std::uint64_t seed = 0;
};

struct EpisodeOutcome {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  Episode episode;
  Classification result;
};

struct OneShotSummary {
  std::vector<EpisodeOutcome> episodes;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // sample standard deviation over scored episodes
  std::size_t scored_episodes = 0;
};

// Episode i uses its own stream derived from (seed, "episode", i), so results
// do not depend on evaluation order.
OneShotSummary run_oneshot(const GatedTransitionNet& net, std::span<const Dataset> classes, const OneShotConfig& config);

std::uint64_t episode_seed(std::uint64_t seed, std::size_t index);

}  // namespace chainorder
