#include <cmath>
#include <numbers>
#include <vector>

#include "chainorder/error.hpp"
#include "chainorder/transition.hpp"
#include "doctest.h"

using namespace chainorder;

namespace {

GatedTransitionNet make_net(StateKind kind, std::size_t p, std::uint64_t seed, std::vector<std::size_t> hidden = {8},
                            double dropout = 0.0) {
  Rng rng(seed);
  return GatedTransitionNet(TransitionArchitecture{kind, p, std::move(hidden), dropout}, rng);
}

// Gate head: weights zero, bias b, so U = sigmoid(b) for every input.
void force_gate(GatedTransitionNet& net, double bias) {
  auto g = net.mutable_block(1);
  const std::size_t p = net.state_dim();
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = i + p >= g.size() ? bias : 0.0;
}

void force_log_variance(GatedTransitionNet& net, double bias) {
  auto v = net.mutable_block(3);
  const std::size_t p = net.state_dim();
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = i + p >= v.size() ? bias : 0.0;
}

void jitter(GatedTransitionNet& net, Rng& rng, double scale) {
  for (double& w : net.mutable_params()) w += rng.uniform(-scale, scale);
}

}  // namespace

TEST_CASE("gaussian log density reference values") {
  // Frozen from scipy.stats.norm.logpdf.
  CHECK(gaussian_log_density(std::vector<double>{0}, std::vector<double>{1}, std::vector<double>{0}) ==
        doctest::Approx(-0.9189385332046727).epsilon(1e-14));
  CHECK(gaussian_log_density(std::vector<double>{0}, std::vector<double>{1}, std::vector<double>{1}) ==
        doctest::Approx(-1.4189385332046727).epsilon(1e-14));
  CHECK(gaussian_log_density(std::vector<double>{0, 0}, std::vector<double>{4, 1}, std::vector<double>{2, 0}) ==
        doctest::Approx(-3.0310242469692907).epsilon(1e-14));
}

TEST_CASE("gaussian log density rejects non-positive variance") {
  try {
    gaussian_log_density(std::vector<double>{0}, std::vector<double>{0}, std::vector<double>{0});
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::domain);
  }
}

TEST_CASE("bernoulli log mass reference values") {
  // Frozen from numpy.log.
  CHECK(bernoulli_log_mass(std::vector<double>{0.5, 0.5}, std::vector<double>{1, 0}) ==
        doctest::Approx(-1.3862943611198906).epsilon(1e-14));
  CHECK(bernoulli_log_mass(std::vector<double>{0.9}, std::vector<double>{1}) ==
        doctest::Approx(-0.10536051565782628).epsilon(1e-14));
  CHECK(bernoulli_log_mass(std::vector<double>{0.9, 0.1, 0.5}, std::vector<double>{1, 0, 1}) ==
        doctest::Approx(-0.9038682118755978).epsilon(1e-14));
}

TEST_CASE("bernoulli log mass rejects boundary probabilities") {
  for (double f : {0.0, 1.0}) {
    try {
      bernoulli_log_mass(std::vector<double>{f}, std::vector<double>{1});
      FAIL("expected a domain error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::domain);
    }
  }
}

TEST_CASE("fully open gate returns the candidate, closed gate the source") {
  auto net = make_net(StateKind::continuous, 3, 4);
  const State s({0.3, -1.2, 2.0}, StateKind::continuous);
  force_gate(net, 800.0);
  auto open = transition_stats(net, s);
  for (std::size_t j = 0; j < 3; ++j) CHECK(open.mean[j] == doctest::Approx(open.candidate[j]).epsilon(1e-15));
  force_gate(net, -800.0);
  auto closed = transition_stats(net, s);
  for (std::size_t j = 0; j < 3; ++j) CHECK(closed.mean[j] == s.values()[j]);
}

TEST_CASE("the mean lies between the candidate and the source") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    auto net = make_net(StateKind::continuous, 2, 100 + trial);
    jitter(net, rng, 0.5);
    const State s({0.3, -1.2}, StateKind::continuous);
    auto st = transition_stats(net, s);
    for (std::size_t j = 0; j < 2; ++j) {
      CHECK(st.gate[j] > 0.0);
      CHECK(st.gate[j] < 1.0);
      CHECK(st.mean[j] >= std::min(st.candidate[j], s.values()[j]));
      CHECK(st.mean[j] <= std::max(st.candidate[j], s.values()[j]));
    }
  }
}

TEST_CASE("log-variance is clamped before exponentiation") {
  auto net = make_net(StateKind::continuous, 2, 5);
  const State s({1.0, 2.0}, StateKind::continuous);
  force_log_variance(net, 50.0);
  auto hi = transition_stats(net, s);
  for (double v : hi.variance) CHECK(v == std::exp(kLogVarianceMax));
  force_log_variance(net, -50.0);
  auto lo = transition_stats(net, s);
  for (double v : lo.variance) CHECK(v == std::exp(kLogVarianceMin));
}

TEST_CASE("closed gate: log T(s | s) is the Gaussian normaliser") {
  auto net = make_net(StateKind::continuous, 3, 6);
  force_gate(net, -800.0);
  const State s({0.5, -0.25, 1.5}, StateKind::continuous);
  auto st = transition_stats(net, s);
  double expected = 0.0;
  for (double v : st.variance) expected += -0.5 * std::log(2.0 * std::numbers::pi * v);
  CHECK(log_transition(net, s, s) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("binary probabilities use the clamped source") {
  auto net = make_net(StateKind::binary, 2, 7);
  force_gate(net, -800.0);
  const State s({1.0, 0.0}, StateKind::binary);
  auto st = transition_stats(net, s);
  CHECK(st.prob[0] == doctest::Approx(1.0 - kProbabilityClamp).epsilon(1e-15));
  CHECK(st.prob[1] == doctest::Approx(kProbabilityClamp).epsilon(1e-12));
  CHECK(std::isfinite(log_transition(net, s, State({0.0, 1.0}, StateKind::binary))));
}

TEST_CASE("kind and shape mismatches are rejected") {
  auto net = make_net(StateKind::continuous, 2, 8);
  try {
    transition_stats(net, State({1.0, 0.0}, StateKind::binary));
    FAIL("expected a kind error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kind);
  }
  try {
    transition_stats(net, State({1.0, 0.0, 3.0}, StateKind::continuous));
    FAIL("expected a shape error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::shape);
  }
}

TEST_CASE("log transition is finite for finite inputs") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto net = make_net(StateKind::continuous, 4, 200 + trial);
    jitter(net, rng, 2.0);
    std::vector<double> a(4), b(4);
    for (auto& v : a) v = rng.normal(0, 100);
    for (auto& v : b) v = rng.normal(0, 100);
    CHECK(std::isfinite(log_transition(net, State(a, StateKind::continuous), State(b, StateKind::continuous))));
  }
}

TEST_CASE("continuous density integrates to one (1-D quadrature)") {
  Rng rng(10);
  for (int trial = 0; trial < 10; ++trial) {
    auto net = make_net(StateKind::continuous, 1, 300 + trial, {8, 8});
    jitter(net, rng, 0.3);
    const State s({rng.normal()}, StateKind::continuous);
    auto st = transition_stats(net, s);
    const double m = st.mean[0], sd = std::sqrt(st.variance[0]);
    const int cells = 4000;
    const double lo = m - 8 * sd, hi = m + 8 * sd, h = (hi - lo) / cells;
    double integral = 0.0;
    for (int i = 0; i <= cells; ++i) {
      const double x = lo + i * h;
      const double w = (i == 0 || i == cells) ? 0.5 : 1.0;
      integral += w * std::exp(log_transition(net, s, State({x}, StateKind::continuous)));
    }
    CHECK(std::abs(integral * h - 1.0) < 1e-3);
  }
}

TEST_CASE("binary mass sums to one over all outcomes") {
  Rng rng(11);
  for (std::size_t p : {1u, 3u, 6u, 10u}) {
    auto net = make_net(StateKind::binary, p, 400 + p);
    jitter(net, rng, 1.0);
    std::vector<double> s(p);
    for (auto& v : s) v = rng.bernoulli(0.5) ? 1.0 : 0.0;
    const State src(s, StateKind::binary);
    double total = 0.0;
    std::vector<double> x(p);
    for (std::size_t mask = 0; mask < (std::size_t{1} << p); ++mask) {
      for (std::size_t j = 0; j < p; ++j) x[j] = (mask >> j) & 1u ? 1.0 : 0.0;
      total += std::exp(log_transition(net, src, State(x, StateKind::binary)));
    }
    CHECK(std::abs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("analytic gradients match central differences") {
  auto cont = transition_gradcheck(StateKind::continuous, 4, 20, 1);
  auto bin = transition_gradcheck(StateKind::binary, 8, 20, 2);
  CHECK(cont.trials == 20);
  CHECK(cont.max_relative_error < 1e-4);
  CHECK(bin.max_relative_error < 1e-4);
  CHECK(transition_gradcheck(StateKind::continuous, 1, 20, 3).max_relative_error < 1e-4);
  CHECK(transition_gradcheck(StateKind::continuous, 8, 20, 4).max_relative_error < 1e-4);
}

TEST_CASE("a corrupted gradient fails the check") {
  CHECK(transition_gradcheck(StateKind::continuous, 4, 20, 1, true).max_relative_error > 1e-2);
}

TEST_CASE("gradcheck guards its dimension") {
  CHECK_THROWS_AS(transition_gradcheck(StateKind::continuous, 100, 20, 1), Error);
  CHECK_THROWS_AS(transition_gradcheck(StateKind::continuous, 0, 20, 1), Error);
}

TEST_CASE("at s' = m the gate and candidate gradients vanish") {
  auto net = make_net(StateKind::continuous, 3, 12);
  Rng rng(12);
  jitter(net, rng, 0.2);
  const State s({0.2, 0.4, -0.6}, StateKind::continuous);
  auto st = transition_stats(net, s);
  const State at_mean(st.mean, StateKind::continuous);
  auto g = log_transition_grad(net, s, at_mean);
  for (std::size_t i = net.block_offset(1); i < net.block_offset(3); ++i) CHECK(g.grad[i] == 0.0);
  double variance_mass = 0.0;
  for (std::size_t i = net.block_offset(3); i < net.block_offset(4); ++i) variance_mass += std::abs(g.grad[i]);
  CHECK(variance_mass > 0.0);
}

TEST_CASE("clamped log-variance passes no gradient") {
  auto net = make_net(StateKind::continuous, 2, 13);
  force_log_variance(net, 50.0);
  const State s({0.2, 0.4}, StateKind::continuous), n({1.0, -1.0}, StateKind::continuous);
  auto g = log_transition_grad(net, s, n);
  for (std::size_t i = net.block_offset(3); i < net.block_offset(4); ++i) CHECK(g.grad[i] == 0.0);
}

TEST_CASE("accumulating and one-shot gradients agree") {
  auto net = make_net(StateKind::continuous, 2, 14);
  const State s({0.2, 0.4}, StateKind::continuous), n({0.1, -0.3}, StateKind::continuous);
  auto g = log_transition_grad(net, s, n);
  std::vector<double> acc(net.param_count(), 1.0);
  const double v = accumulate_log_transition_grad(net, s, n, acc);
  CHECK(v == g.log_value);
  CHECK(v == log_transition(net, s, n));
  for (std::size_t i = 0; i < acc.size(); ++i) CHECK(acc[i] == doctest::Approx(1.0 + g.grad[i]).epsilon(1e-14));
}

TEST_CASE("backward through a stale record is rejected") {
  auto net = make_net(StateKind::continuous, 2, 15);
  const State s({0.2, 0.4}, StateKind::continuous);
  TransitionCache cache;
  transition_stats(net, s, Mode::eval, nullptr, &cache);
  net.mutable_params()[0] += 0.1;
  std::vector<double> grad(net.param_count(), 0.0);
  try {
    transition_backward(net, cache, s.values(), grad);
    FAIL("expected a cache error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::cache);
  }
}

TEST_CASE("train-mode dropout changes outputs, eval mode does not") {
  auto net = make_net(StateKind::continuous, 2, 16, {16}, 0.5);
  const State s({0.2, 0.4}, StateKind::continuous);
  Rng rng(1);
  auto a = transition_stats(net, s, Mode::train, &rng);
  auto b = transition_stats(net, s, Mode::train, &rng);
  CHECK(a.mean != b.mean);
  CHECK(transition_stats(net, s).mean == transition_stats(net, s).mean);
}

TEST_CASE("variance floor concentrates samples at the mean") {
  auto net = make_net(StateKind::continuous, 2, 17);
  force_log_variance(net, -50.0);
  const State s({0.5, -0.5}, StateKind::continuous);
  auto st = transition_stats(net, s);
  const double sd = std::exp(0.5 * kLogVarianceMin);
  Rng rng(3);
  int within = 0, total = 0;
  for (int i = 0; i < 1000; ++i) {
    const State x = sample_next(net, s, rng);
    for (std::size_t j = 0; j < 2; ++j) {
      const double z = std::abs(x.values()[j] - st.mean[j]);
      CHECK(z < 6 * sd);
      within += z <= 3 * sd;
      ++total;
    }
  }
  CHECK(within >= 0.99 * total);
}

TEST_CASE("binary samples match their probabilities") {
  auto net = make_net(StateKind::binary, 2, 18);
  force_gate(net, -800.0);
  const State s({1.0, 0.0}, StateKind::binary);
  Rng rng(4);
  double m0 = 0, m1 = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const State x = sample_next(net, s, rng);
    m0 += x.values()[0];
    m1 += x.values()[1];
  }
  CHECK(std::abs(m0 / n - (1.0 - kProbabilityClamp)) < 0.02);
  CHECK(std::abs(m1 / n - kProbabilityClamp) < 0.02);
}

TEST_CASE("continuous sample moments match (m, v)") {
  auto net = make_net(StateKind::continuous, 2, 19);
  Rng jr(19);
  jitter(net, jr, 0.3);
  const State s({0.3, 0.8}, StateKind::continuous);
  auto st = transition_stats(net, s);
  Rng rng(5);
  const int n = 100000;
  std::vector<double> sum(2, 0.0), sum2(2, 0.0);
  for (int i = 0; i < n; ++i) {
    const State x = sample_next(net, s, rng);
    for (std::size_t j = 0; j < 2; ++j) {
      sum[j] += x.values()[j];
      sum2[j] += x.values()[j] * x.values()[j];
    }
  }
  for (std::size_t j = 0; j < 2; ++j) {
    const double mean = sum[j] / n, var = sum2[j] / n - mean * mean;
    const double v = st.variance[j];
    CHECK(std::abs(mean - st.mean[j]) < 3.0 * std::sqrt(v / n));
    CHECK(std::abs(var - v) < 3.0 * v * std::sqrt(2.0 / (n - 1)));
  }
}

TEST_CASE("sampling is deterministic for a fixed seed") {
  auto net = make_net(StateKind::continuous, 3, 20);
  const State s({0.1, 0.2, 0.3}, StateKind::continuous);
  Rng a(77), b(77);
  for (int i = 0; i < 10; ++i) CHECK(sample_next(net, s, a) == sample_next(net, s, b));
}

TEST_CASE("adopting a parameter vector checks its size") {
  TransitionArchitecture arch{StateKind::continuous, 2, {4}, 0.0};
  auto net = make_net(StateKind::continuous, 2, 21, {4});
  GatedTransitionNet copy(arch, std::vector<double>(net.params().begin(), net.params().end()));
  const State s({0.1, 0.2}, StateKind::continuous);
  CHECK(log_transition(copy, s, s) == log_transition(net, s, s));
  try {
    GatedTransitionNet bad(arch, std::vector<double>(3, 0.0));
    FAIL("expected a dimension error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::dimension);
  }
}
