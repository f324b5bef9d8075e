#include <cmath>
#include <vector>

#include "chainorder/error.hpp"
#include "chainorder/oneshot.hpp"
#include "doctest.h"

using namespace chainorder;

namespace {

GatedTransitionNet make_net(std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  return GatedTransitionNet(TransitionArchitecture{StateKind::continuous, p, {8}, 0.0}, rng);
}

// Closed gate and fixed log-variance: T(.|s) = N(s, e^lv I).
GatedTransitionNet identity_net(std::size_t p, double log_variance) {
  auto net = make_net(p, 1);
  auto gate = net.mutable_block(1);
  for (std::size_t i = 0; i < gate.size(); ++i) gate[i] = i + p >= gate.size() ? -800.0 : 0.0;
  auto var = net.mutable_block(3);
  for (std::size_t i = 0; i < var.size(); ++i) var[i] = i + p >= var.size() ? log_variance : 0.0;
  return net;
}

Dataset cluster(double cx, double cy, std::size_t n, Rng& rng) {
  Dataset d(StateKind::continuous, 2, {});
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> v{cx + 0.1 * rng.normal(), cy + 0.1 * rng.normal()};
    d.push_back(StateView{v, StateKind::continuous});
  }
  return d;
}

}  // namespace

TEST_CASE("an empty chain for k = 0") {
  auto net = make_net(2, 2);
  Rng rng(1);
  CHECK(class_chain(net, State({0.1, 0.2}, StateKind::continuous), 0, rng).empty());
}

TEST_CASE("chains are deterministic in their seed") {
  auto net = make_net(2, 3);
  const State s({0.1, 0.2}, StateKind::continuous);
  Rng a(5), b(5);
  CHECK(class_chain(net, s, 6, a) == class_chain(net, s, 6, b));
}

TEST_CASE("a near-deterministic net follows its mean map") {
  auto net = make_net(2, 4);
  auto var = net.mutable_block(3);
  for (std::size_t i = 0; i < var.size(); ++i) var[i] = i + 2 >= var.size() ? -50.0 : 0.0;
  const State s({0.4, -0.3}, StateKind::continuous);
  Rng rng(6);
  auto chain = class_chain(net, s, 5, rng);
  std::vector<double> m(s.values().begin(), s.values().end());
  for (const State& x : chain) {
    m = transition_stats(net, StateView{m, StateKind::continuous}).mean;
    for (std::size_t j = 0; j < 2; ++j) CHECK(std::abs(x.values()[j] - m[j]) < 3e-2);
    m.assign(x.values().begin(), x.values().end());
  }
}

TEST_CASE("class likelihood averages the support and chain terms") {
  auto net = make_net(2, 7);
  const State sup({0.1, 0.2}, StateKind::continuous), q({0.3, -0.1}, StateKind::continuous);
  CHECK(class_log_likelihood(net, sup, {}, q) == log_transition(net, sup, q));
  const std::vector<State> same{sup, sup, sup};
  CHECK(class_log_likelihood(net, sup, same, q) == doctest::Approx(log_transition(net, sup, q)).epsilon(1e-14));
  const std::vector<State> chain{State({0.5, 0.5}, StateKind::continuous), State({-1.0, 0.0}, StateKind::continuous)};
  const double a = log_transition(net, sup, q), b = log_transition(net, chain[0], q),
               c = log_transition(net, chain[1], q);
  CHECK(class_log_likelihood(net, sup, chain, q) == doctest::Approx((a + b + c) / 3.0).epsilon(1e-14));
}

TEST_CASE("argmax breaks ties toward the smallest class") {
  CHECK(argmax_class(std::vector<double>{1.0, 3.0, 3.0}) == 1);
  CHECK(argmax_class(std::vector<double>{-2.0}) == 0);
}

TEST_CASE("one-way episodes are always correct") {
  auto net = make_net(2, 8);
  Rng data_rng(1);
  std::vector<Dataset> classes{cluster(0, 0, 10, data_rng)};
  OneShotConfig cfg;
  cfg.way = 1;
  cfg.episodes = 20;
  auto s = run_oneshot(net, classes, cfg);
  CHECK(s.mean_accuracy == 1.0);
  CHECK(s.std_accuracy == 0.0);
}

TEST_CASE("far-apart clusters under an identity-gate model are separated") {
  auto net = identity_net(2, 0.0);
  Rng data_rng(2);
  std::vector<Dataset> classes{cluster(0, 0, 10, data_rng), cluster(20, 0, 10, data_rng)};
  OneShotConfig cfg;
  cfg.way = 2;
  cfg.queries_per_class = 4;
  cfg.episodes = 30;
  cfg.seed = 3;
  auto s = run_oneshot(net, classes, cfg);
  CHECK(s.mean_accuracy == 1.0);
  for (const auto& e : s.episodes)
    for (std::size_t i = 0; i < e.episode.queries.size(); ++i) {
      const auto& sc = e.result.scores[i];
      const std::size_t label = e.episode.queries[i].label;
      CHECK(sc[label] > sc[1 - label]);
    }
}

TEST_CASE("with k = 0 classification is nearest support by transition score") {
  auto net = make_net(2, 9);
  Rng data_rng(4);
  std::vector<Dataset> classes{cluster(0, 0, 8, data_rng), cluster(1, 1, 8, data_rng), cluster(-1, 2, 8, data_rng)};
  Rng rng(5);
  Episode ep = build_episode(classes, 3, 3, 0, rng);
  auto r = classify(net, ep, rng);
  for (std::size_t i = 0; i < ep.queries.size(); ++i) {
    std::vector<double> direct;
    for (const State& s : ep.supports) direct.push_back(log_transition(net, s, ep.queries[i].state));
    CHECK(r.predictions[i] == argmax_class(direct));
  }
}

TEST_CASE("episodes are seeded and validated") {
  Rng data_rng(6);
  std::vector<Dataset> classes{cluster(0, 0, 6, data_rng), cluster(5, 0, 6, data_rng), cluster(0, 5, 6, data_rng)};
  Rng a(9), b(9);
  const Episode ea = build_episode(classes, 2, 3, 5, a), eb = build_episode(classes, 2, 3, 5, b);
  CHECK(ea.source_classes == eb.source_classes);
  CHECK(ea.supports == eb.supports);
  CHECK(ea.queries.size() == 6);
  Rng c(1);
  CHECK_THROWS_AS(build_episode(classes, 4, 1, 5, c), Error);
  CHECK_THROWS_AS(build_episode(classes, 2, 6, 5, c), Error);
  CHECK_THROWS_AS(build_episode(classes, 0, 1, 5, c), Error);
}

TEST_CASE("an episode without queries has no accuracy") {
  auto net = make_net(2, 10);
  Rng data_rng(7);
  std::vector<Dataset> classes{cluster(0, 0, 3, data_rng), cluster(5, 5, 3, data_rng)};
  Rng rng(8);
  Episode ep = build_episode(classes, 2, 0, 5, rng);
  CHECK(ep.queries.empty());
  CHECK(!classify(net, ep, rng).accuracy.has_value());
}

TEST_CASE("one-shot runs are reproducible") {
  auto net = make_net(2, 11);
  Rng data_rng(9);
  std::vector<Dataset> classes;
  for (int c = 0; c < 5; ++c) classes.push_back(cluster(3.0 * c, 0, 8, data_rng));
  OneShotConfig cfg;
  cfg.episodes = 10;
  cfg.seed = 12;
  auto a = run_oneshot(net, classes, cfg), b = run_oneshot(net, classes, cfg);
  CHECK(a.mean_accuracy == b.mean_accuracy);
  for (std::size_t e = 0; e < 10; ++e) {
    CHECK(a.episodes[e].seed == episode_seed(12, e));
    CHECK(a.episodes[e].result.predictions == b.episodes[e].result.predictions);
  }
  cfg.episodes = 0;
  CHECK_THROWS_AS(run_oneshot(net, classes, cfg), Error);
}

TEST_CASE("a model with no class information is at chance") {
  // Every class draws from the same distribution, so no model can beat 1/way.
  auto net = make_net(2, 13);
  Rng data_rng(10);
  std::vector<Dataset> classes;
  for (int c = 0; c < 5; ++c) classes.push_back(cluster(0, 0, 12, data_rng));
  OneShotConfig cfg;
  cfg.episodes = 1000;
  cfg.seed = 14;
  CHECK(std::abs(run_oneshot(net, classes, cfg).mean_accuracy - 0.2) < 0.05);
}
