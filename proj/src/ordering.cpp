#include "chainorder/ordering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "chainorder/error.hpp"

namespace chainorder {

TabularScorer::TabularScorer(std::size_t n, std::vector<double> scores) : n_(n), scores_(std::move(scores)) {
  if (scores_.size() != n_ * n_) fail(ErrorCode::shape, "score table must be n x n");
}

TabularScorer model_scorer(const GatedTransitionNet& net, const Dataset& data) {
  std::vector<std::size_t> all(data.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return model_scorer(net, data, all);
}

TabularScorer model_scorer(const GatedTransitionNet& net, const Dataset& data, std::span<const std::size_t> indices) {
  const std::size_t n = indices.size();
  std::vector<double> table(n * n);
  for (std::size_t a = 0; a < n; ++a) {
    const TransitionStats st = transition_stats(net, data.state(indices[a]));
    for (std::size_t b = 0; b < n; ++b) table[a * n + b] = log_density_from_stats(st, data.row(indices[b]));
  }
  return TabularScorer(n, std::move(table));
}

TabularScorer distance_scorer(const Dataset& data, Metric metric) {
  const std::size_t n = data.size();
  std::vector<double> table(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      auto ra = data.row(a), rb = data.row(b);
      double d = 0.0;
      for (std::size_t j = 0; j < ra.size(); ++j) {
        const double diff = ra[j] - rb[j];
        d += metric == Metric::euclidean ? diff * diff : (diff != 0.0 ? 1.0 : 0.0);
      }
      if (metric == Metric::euclidean) d = std::sqrt(d);
      table[a * n + b] = table[b * n + a] = -d;
    }
  }
  return TabularScorer(n, std::move(table));
}

double sequence_log_likelihood(const TransitionScorer& scorer, const Permutation& perm) {
  if (perm.size() < 2) fail(ErrorCode::size, "a sequence likelihood needs at least two instances");
  if (perm.size() != scorer.size())
    fail(ErrorCode::permutation, "permutation has " + std::to_string(perm.size()) + " entries, scorer covers " +
                                     std::to_string(scorer.size()));
  double total = 0.0;
  for (std::size_t t = 1; t < perm.size(); ++t) total += scorer.score(perm[t - 1], perm[t]);
  return total;
}

namespace {

// Builds the greedy chain into `order` and returns its likelihood.
double grow_chain(const TransitionScorer& scorer, std::size_t start, std::vector<std::size_t>& order,
                  std::vector<char>& used) {
  const std::size_t n = scorer.size();
  order.assign(1, start);
  used.assign(n, 0);
  used[start] = 1;
  double total = 0.0;
  std::size_t last = start;
  for (std::size_t step = 1; step < n; ++step) {
    std::size_t best = n;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < n; ++k) {
      if (used[k]) continue;
      const double s = scorer.score(last, k);
      if (best == n || s > best_score) {
        best = k;
        best_score = s;
      }
    }
    used[best] = 1;
    order.push_back(best);
    total += best_score;
    last = best;
  }
  return total;
}

Permutation best_over_starts(const TransitionScorer& scorer, std::vector<std::size_t> starts) {
  // Deterministic reduction: highest likelihood, ties to the smallest start.
  std::sort(starts.begin(), starts.end());
  std::vector<std::size_t> order, best_order;
  std::vector<char> used;
  double best = -std::numeric_limits<double>::infinity();
  bool have = false;
  for (std::size_t start : starts) {
    const double ll = grow_chain(scorer, start, order, used);
    if (!have || ll > best) {
      best = ll;
      best_order = order;
      have = true;
    }
  }
  return Permutation(std::move(best_order));
}

}  // namespace

Permutation greedy_chain(const TransitionScorer& scorer, std::size_t start) {
  if (start >= scorer.size()) fail(ErrorCode::invalid_argument, "start index out of range");
  std::vector<std::size_t> order;
  std::vector<char> used;
  grow_chain(scorer, start, order, used);
  return Permutation(std::move(order));
}

Permutation greedy_order(const TransitionScorer& scorer) {
  const std::size_t n = scorer.size();
  if (n == 0) fail(ErrorCode::size, "cannot order an empty dataset");
  std::vector<std::size_t> starts(n);
  std::iota(starts.begin(), starts.end(), std::size_t{0});
  return best_over_starts(scorer, std::move(starts));
}

Permutation greedy_order_sampled(const TransitionScorer& scorer, std::size_t num_starts, Rng& rng) {
  const std::size_t n = scorer.size();
  if (num_starts < 1 || num_starts > n)
    fail(ErrorCode::invalid_argument, "num_starts must lie in [1, " + std::to_string(n) + "]");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < num_starts; ++i) std::swap(pool[i], pool[i + rng.uniform_index(n - i)]);
  pool.resize(num_starts);
  return best_over_starts(scorer, std::move(pool));
}

Permutation brute_force_order(const TransitionScorer& scorer) {
  const std::size_t n = scorer.size();
  if (n == 0) fail(ErrorCode::size, "cannot order an empty dataset");
  if (n > kBruteForceLimit)
    fail(ErrorCode::size, "exhaustive search is limited to n <= " + std::to_string(kBruteForceLimit));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (n == 1) return Permutation(order);
  std::vector<std::size_t> best = order;
  double best_ll = -std::numeric_limits<double>::infinity();
  bool have = false;
  do {
    double ll = 0.0;
    for (std::size_t t = 1; t < n; ++t) ll += scorer.score(order[t - 1], order[t]);
    if (!have || ll > best_ll) {
      best_ll = ll;
      best = order;
      have = true;
    }
  } while (std::next_permutation(order.begin(), order.end()));
  return Permutation(std::move(best));
}

}  // namespace chainorder
