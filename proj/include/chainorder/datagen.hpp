#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "chainorder/types.hpp"

namespace chainorder {

// An ordered trajectory as generated, with a description of its generator.
struct LabeledTrajectory {
  Dataset states;
  Permutation true_order;  // identity at generation
  std::string generator;
  std::vector<std::pair<std::string, double>> parameters;
  std::uint64_t seed = 0;
};

// s_t = radius * (cos t*step, sin t*step) + N(0, noise_sd^2 I), t = 0..n-1.
LabeledTrajectory gen_rotation_chain(std::size_t n, double radius, double angular_step, double noise_sd,
                                     std::uint64_t seed);

// x_0 = x0, x_{t+1} = A x_t + N(0, noise_sd^2 I). `a` is row-major p x p.
LabeledTrajectory gen_linear_dynamics(std::size_t n, std::span<const double> a, std::span<const double> x0,
                                      double noise_sd, std::uint64_t seed);

// Uniform random initial bits; each bit flips independently with probability
// flip_prob at every step.
LabeledTrajectory gen_bitflip_chain(std::size_t n, std::size_t p, double flip_prob, std::uint64_t seed);

// decay * [[cos, -sin], [sin, cos]], row-major.
std::vector<double> rotation_matrix(double angle, double decay = 1.0);

// Per-feature scaling and translation, applied in place.
void scale_features(Dataset& data, std::span<const double> scales);
void translate(Dataset& data, std::span<const double> offset);

// Shuffled copy with the order that restores generation order attached as the
// dataset's truth: shuffled.reordered(truth) reproduces the trajectory.
Dataset shuffle_with_truth(const LabeledTrajectory& traj, std::uint64_t seed);

// Analytic log-mass of one bit-flip transition at Hamming distance h.
double bitflip_log_mass(std::size_t p, std::size_t hamming, double flip_prob);

// Entropy-rate optimum p * [q log q + (1-q) log(1-q)] of the bit-flip chain.
double bitflip_expected_log_mass(std::size_t p, double flip_prob);

}  // namespace chainorder
