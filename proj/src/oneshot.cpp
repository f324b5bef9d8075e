#include "chainorder/oneshot.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "chainorder/error.hpp"

namespace chainorder {

std::vector<State> class_chain(const GatedTransitionNet& net, const State& support, std::size_t k, Rng& rng) {
  std::vector<State> chain;
  chain.reserve(k);
  for (std::size_t i = 0; i < k; ++i) chain.push_back(sample_next(net, i == 0 ? support : chain.back(), rng));
  return chain;
}

double class_log_likelihood(const GatedTransitionNet& net, const State& support, std::span<const State> chain,
                            const State& query) {
  double total = log_transition(net, support, query);
  for (const State& s : chain) total += log_transition(net, s, query);
  return total / static_cast<double>(chain.size() + 1);
}

std::size_t argmax_class(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < scores.size(); ++c)
    if (scores[c] > scores[best]) best = c;
  return best;
}

Classification classify(const GatedTransitionNet& net, const Episode& episode, Rng& rng) {
  if (episode.supports.size() != episode.way) fail(ErrorCode::episode, "episode needs exactly one support per class");
  for (const Query& q : episode.queries)
    if (q.label >= episode.way) fail(ErrorCode::episode, "query label outside the episode's classes");

  // Stats of every state on every class chain, computed once per episode.
  std::vector<std::vector<TransitionStats>> chain_stats(episode.way);
  for (std::size_t c = 0; c < episode.way; ++c) {
    const std::vector<State> chain = class_chain(net, episode.supports[c], episode.chain_length, rng);
    chain_stats[c].push_back(transition_stats(net, episode.supports[c]));
    for (const State& s : chain) chain_stats[c].push_back(transition_stats(net, s));
  }

  Classification out;
  for (const Query& q : episode.queries) {
    if (q.state.kind() != net.kind() || q.state.dim() != net.state_dim())
      fail(ErrorCode::kind, "query does not match the model's state kind and dimension");
    std::vector<double> scores(episode.way);
    for (std::size_t c = 0; c < episode.way; ++c) {
      double total = 0.0;
      for (const TransitionStats& st : chain_stats[c]) total += log_density_from_stats(st, q.state.values());
      scores[c] = total / static_cast<double>(chain_stats[c].size());
    }
    const std::size_t pred = argmax_class(scores);
    out.predictions.push_back(pred);
    out.scores.push_back(std::move(scores));
    if (pred == q.label) ++out.correct;
  }
  if (!episode.queries.empty())
    out.accuracy = static_cast<double>(out.correct) / static_cast<double>(episode.queries.size());
  return out;
}

Episode build_episode(std::span<const Dataset> classes, std::size_t way, std::size_t queries_per_class,
                      std::size_t chain_length, Rng& rng) {
  if (way == 0) fail(ErrorCode::episode, "way must be at least 1");
  if (classes.size() < way)
    fail(ErrorCode::episode, "episode needs " + std::to_string(way) + " classes, only " +
                                 std::to_string(classes.size()) + " available");
  for (std::size_t c = 0; c < classes.size(); ++c)
    if (classes[c].size() < 1 + queries_per_class)
      fail(ErrorCode::episode, "class " + std::to_string(c) + " has too few instances for one support and " +
                                   std::to_string(queries_per_class) + " queries");

  std::vector<std::size_t> pool = Permutation::identity(classes.size()).order();
  for (std::size_t i = 0; i < way; ++i) std::swap(pool[i], pool[i + rng.uniform_index(pool.size() - i)]);

  Episode ep;
  ep.way = way;
  ep.chain_length = chain_length;
  for (std::size_t c = 0; c < way; ++c) {
    const Dataset& data = classes[pool[c]];
    ep.source_classes.push_back(pool[c]);
    std::vector<std::size_t> idx = Permutation::identity(data.size()).order();
    const std::size_t need = 1 + queries_per_class;
    for (std::size_t i = 0; i < need; ++i) std::swap(idx[i], idx[i + rng.uniform_index(idx.size() - i)]);
    ep.supports.push_back(data.owned_state(idx[0]));
    for (std::size_t i = 1; i < need; ++i) ep.queries.push_back({data.owned_state(idx[i]), c});
  }
  return ep;
}

std::uint64_t episode_seed(std::uint64_t seed, std::size_t index) {
  return derive_seed(derive_seed(seed, "episode"), std::to_string(index));
}

OneShotSummary run_oneshot(const GatedTransitionNet& net, std::span<const Dataset> classes, const OneShotConfig& config) {
  if (config.episodes == 0) fail(ErrorCode::episode, "at least one episode is required");
  OneShotSummary summary;
  double sum = 0.0, sum_sq = 0.0;
  for (std::size_t e = 0; e < config.episodes; ++e) {
    EpisodeOutcome outcome;
    outcome.index = e;
    outcome.seed = episode_seed(config.seed, e);
    Rng rng(outcome.seed);
    outcome.episode = build_episode(classes, config.way, config.queries_per_class, config.chain_length, rng);
    outcome.result = classify(net, outcome.episode, rng);
    if (outcome.result.accuracy) {
      const double a = *outcome.result.accuracy;
      sum += a;
      sum_sq += a * a;
      ++summary.scored_episodes;
    }
    summary.episodes.push_back(std::move(outcome));
  }
  const double m = static_cast<double>(summary.scored_episodes);
  if (summary.scored_episodes > 0) summary.mean_accuracy = sum / m;
  if (summary.scored_episodes > 1)
    summary.std_accuracy = std::sqrt(std::max(0.0, (sum_sq - m * summary.mean_accuracy * summary.mean_accuracy) / (m - 1.0)));
  return summary;
}

}  // namespace chainorder
