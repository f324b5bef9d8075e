#include "chainorder/datagen.hpp"

#include <cmath>
#include <string>

#include "chainorder/error.hpp"
#include "chainorder/rng.hpp"

namespace chainorder {

LabeledTrajectory gen_rotation_chain(std::size_t n, double radius, double angular_step, double noise_sd,
                                     std::uint64_t seed) {
  if (n < 2) fail(ErrorCode::invalid_argument, "n must be at least 2");
  if (!(noise_sd >= 0.0)) fail(ErrorCode::invalid_argument, "noise_sd must be non-negative");
  Rng rng(derive_seed(seed, "rotation"));
  std::vector<double> values;
  values.reserve(2 * n);
  for (std::size_t t = 0; t < n; ++t) {
    const double angle = static_cast<double>(t) * angular_step;
    values.push_back(radius * std::cos(angle) + noise_sd * rng.normal());
    values.push_back(radius * std::sin(angle) + noise_sd * rng.normal());
  }
  return {Dataset(StateKind::continuous, 2, std::move(values)),
          Permutation::identity(n),
          "rotation",
          {{"n", static_cast<double>(n)}, {"radius", radius}, {"angular_step", angular_step}, {"noise_sd", noise_sd}},
          seed};
}

LabeledTrajectory gen_linear_dynamics(std::size_t n, std::span<const double> a, std::span<const double> x0,
                                      double noise_sd, std::uint64_t seed) {
  const std::size_t p = x0.size();
  if (n < 2) fail(ErrorCode::invalid_argument, "n must be at least 2");
  if (p == 0) fail(ErrorCode::invalid_argument, "x0 must have at least one component");
  if (a.size() != p * p) fail(ErrorCode::shape, "A must be p x p with p = dim(x0)");
  for (double v : a)
    if (!std::isfinite(v)) fail(ErrorCode::invalid_argument, "A has a non-finite entry");
  if (!(noise_sd >= 0.0)) fail(ErrorCode::invalid_argument, "noise_sd must be non-negative");
  Rng rng(derive_seed(seed, "linear"));
  std::vector<double> values(x0.begin(), x0.end());
  values.reserve(n * p);
  std::vector<double> cur(x0.begin(), x0.end()), next(p);
  for (std::size_t t = 1; t < n; ++t) {
    for (std::size_t i = 0; i < p; ++i) {
      double acc = 0.0;
      for (std::size_t j = 0; j < p; ++j) acc += a[i * p + j] * cur[j];
      next[i] = acc + noise_sd * rng.normal();
    }
    cur.swap(next);
    values.insert(values.end(), cur.begin(), cur.end());
  }
  return {Dataset(StateKind::continuous, p, std::move(values)),
          Permutation::identity(n),
          "linear",
          {{"n", static_cast<double>(n)}, {"noise_sd", noise_sd}},
          seed};
}

LabeledTrajectory gen_bitflip_chain(std::size_t n, std::size_t p, double flip_prob, std::uint64_t seed) {
  if (n < 2) fail(ErrorCode::invalid_argument, "n must be at least 2");
  if (p < 1) fail(ErrorCode::invalid_argument, "p must be at least 1");
  if (!(flip_prob > 0.0 && flip_prob < 0.5)) fail(ErrorCode::invalid_argument, "flip_prob must lie in (0, 0.5)");
  Rng rng(derive_seed(seed, "bitflip"));
  std::vector<double> cur(p);
  for (double& b : cur) b = rng.bernoulli(0.5) ? 1.0 : 0.0;
  std::vector<double> values(cur);
  values.reserve(n * p);
  for (std::size_t t = 1; t < n; ++t) {
    for (double& b : cur)
      if (rng.bernoulli(flip_prob)) b = 1.0 - b;
    values.insert(values.end(), cur.begin(), cur.end());
  }
  return {Dataset(StateKind::binary, p, std::move(values)),
          Permutation::identity(n),
          "bitflip",
          {{"n", static_cast<double>(n)}, {"p", static_cast<double>(p)}, {"flip_prob", flip_prob}},
          seed};
}

std::vector<double> rotation_matrix(double angle, double decay) {
  const double c = std::cos(angle), s = std::sin(angle);
  return {decay * c, -decay * s, decay * s, decay * c};
}

namespace {

Dataset rebuilt(const Dataset& data, std::vector<double> values) {
  Dataset out(data.kind(), data.dim(), std::move(values));
  if (data.truth()) out.set_truth(*data.truth());
  return out;
}

}  // namespace

void scale_features(Dataset& data, std::span<const double> scales) {
  if (scales.size() != data.dim()) fail(ErrorCode::shape, "one scale per feature is required");
  if (data.kind() != StateKind::continuous) fail(ErrorCode::kind, "only continuous datasets can be rescaled");
  std::vector<double> values = data.values();
  for (std::size_t k = 0; k < values.size(); ++k) values[k] *= scales[k % data.dim()];
  data = rebuilt(data, std::move(values));
}

void translate(Dataset& data, std::span<const double> offset) {
  if (offset.size() != data.dim()) fail(ErrorCode::shape, "one offset per feature is required");
  if (data.kind() != StateKind::continuous) fail(ErrorCode::kind, "only continuous datasets can be translated");
  std::vector<double> values = data.values();
  for (std::size_t k = 0; k < values.size(); ++k) values[k] += offset[k % data.dim()];
  data = rebuilt(data, std::move(values));
}

Dataset shuffle_with_truth(const LabeledTrajectory& traj, std::uint64_t seed) {
  const std::size_t n = traj.states.size();
  Rng rng(derive_seed(seed, "shuffle"));
  std::vector<std::size_t> sigma = Permutation::identity(n).order();
  for (std::size_t i = n; i > 1; --i) std::swap(sigma[i - 1], sigma[rng.uniform_index(i)]);
  // shuffled[i] = original[sigma[i]]; truth[t] is where original[t] landed.
  Dataset shuffled = traj.states.reordered(sigma);
  shuffled.set_truth(Permutation(std::move(sigma)).inverse());
  return shuffled;
}

double bitflip_log_mass(std::size_t p, std::size_t hamming, double flip_prob) {
  return static_cast<double>(hamming) * std::log(flip_prob) +
         static_cast<double>(p - hamming) * std::log1p(-flip_prob);
}

double bitflip_expected_log_mass(std::size_t p, double flip_prob) {
  const double q = flip_prob;
  return static_cast<double>(p) * (q * std::log(q) + (1.0 - q) * std::log1p(-q));
}

}  // namespace chainorder
