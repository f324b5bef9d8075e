#include <cmath>
#include <numeric>
#include <vector>

#include "chainorder/datagen.hpp"
#include "chainorder/error.hpp"
#include "chainorder/evaluation.hpp"
#include "doctest.h"

using namespace chainorder;

namespace {

Permutation random_perm(std::size_t n, Rng& rng) {
  std::vector<std::size_t> o(n);
  std::iota(o.begin(), o.end(), 0);
  for (std::size_t i = n; i > 1; --i) std::swap(o[i - 1], o[rng.uniform_index(i)]);
  return Permutation(o);
}

// Pair enumeration over item ranks.
double tau_by_pairs(const Permutation& a, const Permutation& b) {
  const auto ra = a.ranks(), rb = b.ranks();
  const std::size_t n = a.size();
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const long long da = static_cast<long long>(ra[i]) - static_cast<long long>(ra[j]);
      const long long db = static_cast<long long>(rb[i]) - static_cast<long long>(rb[j]);
      if (da * db > 0) ++concordant;
      else ++discordant;
    }
  return static_cast<double>(concordant - discordant) / static_cast<double>(n * (n - 1) / 2);
}

}  // namespace

TEST_CASE("tau of identical and reversed orders") {
  const Permutation a({0, 1, 2, 3});
  CHECK(kendall_tau_b(a, a) == 1.0);
  for (std::size_t n : {2u, 3u, 10u, 51u}) {
    const Permutation id = Permutation::identity(n);
    CHECK(kendall_tau_b(id, id.reversed()) == -1.0);
  }
}

TEST_CASE("one adjacent swap in four items") {
  CHECK(kendall_tau_b(Permutation({0, 1, 2, 3}), Permutation({1, 0, 2, 3})) ==
        doctest::Approx(4.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("merge count equals pair enumeration") {
  Rng rng(31);
  for (int trial = 0; trial < 500; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(49);
    const Permutation a = random_perm(n, rng), b = random_perm(n, rng);
    CHECK(kendall_tau_b(a, b) == tau_by_pairs(a, b));
  }
}

TEST_CASE("tau is symmetric") {
  Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const Permutation a = random_perm(20, rng), b = random_perm(20, rng);
    CHECK(kendall_tau_b(a, b) == kendall_tau_b(b, a));
  }
}

TEST_CASE("tau rejects mismatched or tiny inputs") {
  CHECK_THROWS_AS(kendall_tau_b(Permutation({0, 1}), Permutation({0, 1, 2})), Error);
  CHECK_THROWS_AS(kendall_tau_b(Permutation({0}), Permutation({0})), Error);
}

TEST_CASE("report handles the direction ambiguity") {
  const Permutation truth({3, 0, 2, 1, 4});
  auto same = evaluate_order(truth, truth);
  CHECK(same.tau_forward == 1.0);
  CHECK(same.tau_best == 1.0);
  auto rev = evaluate_order(truth, truth.reversed());
  CHECK(rev.tau_forward == -1.0);
  CHECK(rev.tau_reverse == 1.0);
  CHECK(rev.tau_best == 1.0);
}

TEST_CASE("report on a dataset needs a truth") {
  Dataset d(StateKind::continuous, 1, {0, 1, 2});
  CHECK_THROWS_AS(evaluate_order(d, Permutation({0, 1, 2})), Error);
  d.set_truth(Permutation({2, 1, 0}));
  CHECK(evaluate_order(d, Permutation({0, 1, 2})).tau_best == 1.0);
}

TEST_CASE("random orders have mean tau near zero") {
  Rng rng(33);
  const Permutation truth = Permutation::identity(100);
  double sum = 0.0;
  for (int trial = 0; trial < 1000; ++trial) sum += evaluate_order(truth, random_perm(100, rng)).tau_forward;
  CHECK(std::abs(sum / 1000) < 0.05);
}

TEST_CASE("nn order sorts points on a line") {
  Dataset d(StateKind::continuous, 1, {2, 0, 3, 1});
  d.set_truth(Permutation({1, 3, 0, 2}));
  CHECK(evaluate_order(d, nn_order(d)).tau_best == 1.0);
}

TEST_CASE("nn order on one point") {
  Dataset d(StateKind::continuous, 2, {1, 1});
  CHECK(nn_order(d) == Permutation({0}));
}

TEST_CASE("nn order finishes one cluster before the other") {
  Dataset d(StateKind::continuous, 2,
            {0, 0, 100, 0, 0.5, 0.1, 100.4, 0.2, 1.1, -0.1, 101.0, 0.1, 1.4, 0.3, 99.5, -0.2});
  const Permutation p = nn_order(d);
  int crossings = 0;
  for (std::size_t t = 1; t < p.size(); ++t) crossings += (d.row(p[t - 1])[0] > 50) != (d.row(p[t])[0] > 50);
  CHECK(crossings == 1);
}

TEST_CASE("nn order is invariant to translation and rotation") {
  Dataset d = shuffle_with_truth(gen_rotation_chain(40, 1.0, 0.1, 0.05, 7), 8);
  const Permutation base = nn_order(d);
  Dataset moved = d;
  const std::vector<double> offset{3.0, -7.0};
  translate(moved, offset);
  CHECK(nn_order(moved) == base);
  // Rotation by 90 degrees is exact in floating point.
  std::vector<double> rotated;
  for (std::size_t i = 0; i < d.size(); ++i) {
    rotated.push_back(-d.row(i)[1]);
    rotated.push_back(d.row(i)[0]);
  }
  CHECK(nn_order(Dataset(StateKind::continuous, 2, rotated)) == base);
}

TEST_CASE("nn order with a start and hamming metric") {
  Dataset bits(StateKind::binary, 3, {0, 0, 0, 1, 1, 1, 0, 0, 1, 0, 1, 1});
  CHECK(nn_order(bits, 0, Metric::hamming) == Permutation({0, 2, 3, 1}));
  CHECK_THROWS_AS(nn_order(bits, 4, Metric::hamming), Error);
}

TEST_CASE("propagation sticks between two mutual nearest states") {
  TabularScorer s(3, {0, -1, -5,  //
                      -1, 0, -5,  //
                      -5, -5, 0});
  auto p = propagate(s, 0, 5);
  CHECK(p.sequence == std::vector<std::size_t>{0, 1, 0, 1, 0, 1});
  CHECK(!p.truncated);
}

TEST_CASE("propagation without revisits visits distinct states") {
  TabularScorer s(4, {0, -1, -5, -6,  //
                      -1, 0, -5, -6,  //
                      -5, -5, 0, -2,  //
                      -6, -6, -2, 0});
  auto p = propagate(s, 0, 3, false);
  CHECK(p.sequence == std::vector<std::size_t>{0, 1, 2, 3});
  auto over = propagate(s, 0, 10, false);
  CHECK(over.sequence.size() == 4);
  CHECK(over.truncated);
}

TEST_CASE("propagation follows a cycle") {
  TabularScorer s(4, std::vector<double>(16, -10.0));
  for (std::size_t i = 0; i < 4; ++i) s.set(i, (i + 1) % 4, 0.0);
  CHECK(propagate(s, 2, 6).sequence == std::vector<std::size_t>{2, 3, 0, 1, 2, 3, 0});
}

TEST_CASE("propagation validates its arguments") {
  TabularScorer s(2, {0, -1, -1, 0});
  CHECK_THROWS_AS(propagate(s, 2, 1), Error);
  CHECK_THROWS_AS(propagate(s, 0, 0), Error);
}
