#include "chainorder/evaluation.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <string>

#include "chainorder/error.hpp"

namespace chainorder {

namespace {

std::uint64_t count_inversions(std::vector<std::size_t>& xs, std::vector<std::size_t>& scratch, std::size_t lo,
                               std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::uint64_t inv = count_inversions(xs, scratch, lo, mid) + count_inversions(xs, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (xs[i] <= xs[j]) {
      scratch[k++] = xs[i++];
    } else {
      inv += mid - i;
      scratch[k++] = xs[j++];
    }
  }
  while (i < mid) scratch[k++] = xs[i++];
  while (j < hi) scratch[k++] = xs[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            xs.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

}  // namespace

double kendall_tau_b(const Permutation& a, const Permutation& b) {
  if (a.size() != b.size())
    fail(ErrorCode::size, "permutations differ in length (" + std::to_string(a.size()) + " vs " +
                              std::to_string(b.size()) + ")");
  const std::size_t n = a.size();
  if (n < 2) fail(ErrorCode::size, "Kendall tau needs at least two items");
  // Walk the items in a's order and read off their positions in b; every
  // inversion of that sequence is a discordant pair.
  const std::vector<std::size_t> rank_b = b.ranks();
  std::vector<std::size_t> seq(n), scratch(n);
  for (std::size_t t = 0; t < n; ++t) seq[t] = rank_b[a[t]];
  const std::uint64_t discordant = count_inversions(seq, scratch, 0, n);
  const std::uint64_t pairs = static_cast<std::uint64_t>(n) * (n - 1) / 2;
  const double c_minus_d = static_cast<double>(pairs) - 2.0 * static_cast<double>(discordant);
  return c_minus_d / static_cast<double>(pairs);
}

OrderReport evaluate_order(const Permutation& truth, const Permutation& recovered, std::string method) {
  OrderReport r;
  r.tau_forward = kendall_tau_b(recovered, truth);
  r.tau_reverse = kendall_tau_b(recovered, truth.reversed());
  r.tau_best = std::max(r.tau_forward, r.tau_reverse);
  r.recovered = recovered;
  r.method = std::move(method);
  return r;
}

OrderReport evaluate_order(const Dataset& data, const Permutation& recovered, std::string method) {
  if (!data.truth()) fail(ErrorCode::invalid_argument, "dataset carries no ground-truth order");
  return evaluate_order(*data.truth(), recovered, std::move(method));
}

Permutation nn_order(const Dataset& data, std::optional<std::size_t> start, Metric metric) {
  if (data.empty()) fail(ErrorCode::size, "cannot order an empty dataset");
  const TabularScorer scorer = distance_scorer(data, metric);
  return start ? greedy_chain(scorer, *start) : greedy_order(scorer);
}

Propagation propagate(const TransitionScorer& scorer, std::size_t start, std::size_t steps, bool revisit) {
  const std::size_t n = scorer.size();
  if (start >= n) fail(ErrorCode::invalid_argument, "start index " + std::to_string(start) + " out of range");
  if (steps < 1) fail(ErrorCode::invalid_argument, "propagation needs at least one step");
  Propagation out;
  out.sequence.push_back(start);
  std::vector<char> visited(n, 0);
  visited[start] = 1;
  std::size_t cur = start;
  for (std::size_t s = 0; s < steps; ++s) {
    std::size_t best = n;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n; ++j) {
      if (j == cur || (!revisit && visited[j])) continue;
      const double v = scorer.score(cur, j);
      if (best == n || v > best_score) {
        best = j;
        best_score = v;
      }
    }
    if (best == n) {
      out.truncated = true;
      break;
    }
    out.sequence.push_back(best);
    visited[best] = 1;
    cur = best;
  }
  return out;
}

}  // namespace chainorder
