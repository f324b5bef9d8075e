#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "chainorder/rng.hpp"
#include "chainorder/transition.hpp"
#include "chainorder/types.hpp"

namespace chainorder {

// score(from, to) is the log transition weight of moving from instance `from`
// to instance `to` over some bound dataset.
class TransitionScorer {
 public:
  virtual ~TransitionScorer() = default;
  virtual std::size_t size() const = 0;
  virtual double score(std::size_t from, std::size_t to) const = 0;
};

// Dense n x n score table, row = from.
class TabularScorer final : public TransitionScorer {
 public:
  TabularScorer() = default;
  TabularScorer(std::size_t n, std::vector<double> scores);

  std::size_t size() const override { return n_; }
  double score(std::size_t from, std::size_t to) const override { return scores_[from * n_ + to]; }
  void set(std::size_t from, std::size_t to, double value) { scores_[from * n_ + to] = value; }
  const std::vector<double>& table() const { return scores_; }

 private:
  std::size_t n_ = 0;
  std::vector<double> scores_;
};

// log T(s_to | s_from; theta) for every pair of the given instances (eval mode).
// One forward pass per source, so building the table costs n net evaluations
// and n^2 density evaluations.
TabularScorer model_scorer(const GatedTransitionNet& net, const Dataset& data);
TabularScorer model_scorer(const GatedTransitionNet& net, const Dataset& data, std::span<const std::size_t> indices);

enum class Metric { euclidean, hamming };

// score(i, j) = -distance(s_i, s_j).
TabularScorer distance_scorer(const Dataset& data, Metric metric = Metric::euclidean);

// Sum of score(order[t-1], order[t]) over t = 1..n-1; the uniform initial
// term is a constant and omitted. Requires n >= 2.
double sequence_log_likelihood(const TransitionScorer& scorer, const Permutation& perm);

// Chain grown from `start` by repeatedly appending the best unused successor
// (ties to the smallest index).
Permutation greedy_chain(const TransitionScorer& scorer, std::size_t start);

// Best greedy chain over all n starts (ties to the smallest start). O(n^3).
Permutation greedy_order(const TransitionScorer& scorer);

// Same, over `num_starts` starts drawn uniformly without replacement. O(k n^2).
Permutation greedy_order_sampled(const TransitionScorer& scorer, std::size_t num_starts, Rng& rng);

inline constexpr std::size_t kBruteForceLimit = 10;

// Exhaustive maximiser over all n! orders; ties go to the lexicographically
// smallest order. n <= kBruteForceLimit.
Permutation brute_force_order(const TransitionScorer& scorer);

}  // namespace chainorder
