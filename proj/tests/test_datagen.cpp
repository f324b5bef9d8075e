#include <cmath>
#include <numbers>
#include <vector>

#include "chainorder/datagen.hpp"
#include "chainorder/error.hpp"
#include "chainorder/evaluation.hpp"
#include "doctest.h"

using namespace chainorder;

namespace {

double dist(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("noise-free rotation is an evenly spaced circle") {
  const std::size_t n = 16;
  auto traj = gen_rotation_chain(n, 2.0, 2 * std::numbers::pi / n, 0.0, 1);
  const Dataset& d = traj.states;
  REQUIRE(d.size() == n);
  const double first = dist(d.row(0), d.row(1));
  for (std::size_t t = 0; t < n; ++t) {
    CHECK(dist(d.row(t), std::vector<double>{0, 0}) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(dist(d.row(t), d.row((t + 1) % n)) == doctest::Approx(first).epsilon(1e-12));
  }
  CHECK(traj.true_order == Permutation::identity(n));
}

TEST_CASE("noise-free arc is recovered by the nn baseline") {
  auto traj = gen_rotation_chain(64, 1.0, 0.0736, 0.0, 2);
  CHECK(evaluate_order(shuffle_with_truth(traj, 3), nn_order(shuffle_with_truth(traj, 3))).tau_best == 1.0);
}

TEST_CASE("generators are deterministic in their seed") {
  CHECK(gen_rotation_chain(20, 1.0, 0.1, 0.02, 5).states == gen_rotation_chain(20, 1.0, 0.1, 0.02, 5).states);
  CHECK(gen_rotation_chain(20, 1.0, 0.1, 0.02, 5).states != gen_rotation_chain(20, 1.0, 0.1, 0.02, 6).states);
  CHECK(gen_bitflip_chain(20, 8, 0.1, 5).states == gen_bitflip_chain(20, 8, 0.1, 5).states);
  const auto a = rotation_matrix(0.3, 0.9);
  const std::vector<double> x0{1.0, 0.0};
  CHECK(gen_linear_dynamics(20, a, x0, 0.01, 5).states == gen_linear_dynamics(20, a, x0, 0.01, 5).states);
}

TEST_CASE("identity dynamics without noise is constant") {
  const std::vector<double> eye{1, 0, 0, 1}, x0{0.5, -2.0};
  auto traj = gen_linear_dynamics(10, eye, x0, 0.0, 1);
  for (std::size_t t = 0; t < 10; ++t) {
    CHECK(traj.states.row(t)[0] == 0.5);
    CHECK(traj.states.row(t)[1] == -2.0);
  }
}

TEST_CASE("a decaying rotation spirals inward") {
  const auto a = rotation_matrix(2 * std::numbers::pi / 16, 0.95);
  const std::vector<double> x0{1.0, 0.0};
  auto traj = gen_linear_dynamics(64, a, x0, 0.0, 1);
  double prev = INFINITY;
  for (std::size_t t = 1; t < 64; ++t) {
    const double step = dist(traj.states.row(t - 1), traj.states.row(t));
    CHECK(step < prev);
    prev = step;
  }
}

TEST_CASE("rotation matrix entries") {
  const auto r = rotation_matrix(std::numbers::pi / 2, 2.0);
  CHECK(r[0] == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r[1] == -2.0);
  CHECK(r[2] == 2.0);
}

TEST_CASE("generator arguments are validated") {
  CHECK_THROWS_AS(gen_rotation_chain(1, 1.0, 0.1, 0.0, 1), Error);
  CHECK_THROWS_AS(gen_rotation_chain(10, 1.0, 0.1, -1.0, 1), Error);
  CHECK_THROWS_AS(gen_bitflip_chain(10, 4, 0.0, 1), Error);
  CHECK_THROWS_AS(gen_bitflip_chain(10, 0, 0.1, 1), Error);
  const std::vector<double> a{1, 0, 0}, x0{1, 0};
  CHECK_THROWS_AS(gen_linear_dynamics(10, a, x0, 0.0, 1), Error);
}

TEST_CASE("bit-flip chains flip about q of the bits per step") {
  const std::size_t n = 2000, p = 16;
  const double q = 0.05;
  auto traj = gen_bitflip_chain(n, p, q, 9);
  std::size_t flips = 0;
  for (std::size_t t = 1; t < n; ++t)
    for (std::size_t j = 0; j < p; ++j) flips += traj.states.row(t)[j] != traj.states.row(t - 1)[j];
  const double rate = static_cast<double>(flips) / static_cast<double>((n - 1) * p);
  const double se = std::sqrt(q * (1 - q) / static_cast<double>((n - 1) * p));
  CHECK(std::abs(rate - q) < 4 * se);
}

TEST_CASE("bit-flip log mass values") {
  CHECK(bitflip_log_mass(8, 3, 0.1) == doctest::Approx(-7.434557857271268).epsilon(1e-14));
  // Frozen from the closed form evaluated in double precision with Python's math.log.
  CHECK(bitflip_expected_log_mass(16, 0.05) == doctest::Approx(-3.1762438935339614).epsilon(1e-14));
}

TEST_CASE("shuffled data restores the trajectory through its truth") {
  auto traj = gen_rotation_chain(30, 1.0, 0.1, 0.05, 4);
  const Dataset s = shuffle_with_truth(traj, 11);
  REQUIRE(s.truth());
  CHECK(s.reordered(s.truth()->order()) == traj.states);
  CHECK(s != traj.states);
  CHECK(shuffle_with_truth(traj, 11) == s);
}

TEST_CASE("scaling and translation act per feature and keep the truth") {
  Dataset d = shuffle_with_truth(gen_rotation_chain(5, 1.0, 0.3, 0.0, 1), 2);
  const Dataset before = d;
  const std::vector<double> scale{10.0, 0.5}, offset{1.0, -1.0};
  scale_features(d, scale);
  translate(d, offset);
  for (std::size_t i = 0; i < d.size(); ++i) {
    CHECK(d.row(i)[0] == before.row(i)[0] * 10.0 + 1.0);
    CHECK(d.row(i)[1] == before.row(i)[1] * 0.5 - 1.0);
  }
  CHECK(d.truth() == before.truth());
  const std::vector<double> wrong{1.0};
  CHECK_THROWS_AS(scale_features(d, wrong), Error);
  Dataset bits(StateKind::binary, 1, {0, 1});
  CHECK_THROWS_AS(translate(bits, wrong), Error);
}
