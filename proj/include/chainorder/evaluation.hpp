#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "chainorder/ordering.hpp"
#include "chainorder/types.hpp"

namespace chainorder {

// Kendall tau-b between two orders of the same items. Permutations have no
// ties, so this is (C - D) / (n(n-1)/2). Inversions are counted by merge sort.
double kendall_tau_b(const Permutation& a, const Permutation& b);

struct OrderReport {
  double tau_forward = 0.0;  // against the true order
  double tau_reverse = 0.0;  // against the reversed true order
  double tau_best = 0.0;
  Permutation recovered;
  std::string method;
};

// A Markov order and its reverse are both valid discoveries, so both
// directions are reported.
OrderReport evaluate_order(const Dataset& data, const Permutation& recovered, std::string method = "learned");
OrderReport evaluate_order(const Permutation& truth, const Permutation& recovered, std::string method = "learned");

// Nearest-neighbour chain under score(i, j) = -distance(s_i, s_j). Without a
// start, every start is tried and the shortest total path wins.
Permutation nn_order(const Dataset& data, std::optional<std::size_t> start = std::nullopt,
                     Metric metric = Metric::euclidean);

struct Propagation {
  std::vector<std::size_t> sequence;  // starts with the start index
  bool truncated = false;             // ran out of candidates before `steps`
};

// Repeatedly moves to argmax_j score(current, j) over j != current; with
// revisit = false, previously visited indices are excluded as well.
Propagation propagate(const TransitionScorer& scorer, std::size_t start, std::size_t steps, bool revisit = true);

}  // namespace chainorder
