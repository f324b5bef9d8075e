#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace chainorder {

// Maps (master seed, stream name) to an independent seed. All randomness in a
// run flows from one master seed through named streams such as "train",
// "shuffle", "episode" and "dropout".
std::uint64_t derive_seed(std::uint64_t master, std::string_view stream) noexcept;

// Seeded random source. The engine is std::mt19937_64; the distributions are
// implemented here so that sequences are identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform on {0, ..., n-1}, unbiased (rejection sampling). n must be > 0.
  std::size_t uniform_index(std::size_t n);

  // Standard normal via Box-Muller; the second variate of each pair is cached.
  double normal();

  double normal(double mean, double sd) { return mean + sd * normal(); }

  bool bernoulli(double p) { return uniform() < p; }

  Rng split(std::string_view stream) { return Rng(derive_seed(next_u64(), stream)); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace chainorder
