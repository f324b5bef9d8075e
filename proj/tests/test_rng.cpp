#include <cmath>
#include <set>
#include <vector>

#include "chainorder/rng.hpp"
#include "doctest.h"

using namespace chainorder;

TEST_CASE("equal seeds give equal streams") {
  Rng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
    CHECK(a.normal() == b.normal());
    CHECK(a.uniform_index(17) == b.uniform_index(17));
  }
}

TEST_CASE("derived seeds separate named streams") {
  CHECK(derive_seed(7, "train") == derive_seed(7, "train"));
  CHECK(derive_seed(7, "train") != derive_seed(7, "shuffle"));
  CHECK(derive_seed(7, "train") != derive_seed(8, "train"));
  std::set<std::uint64_t> seen;
  for (const char* s : {"train", "shuffle", "episode", "dropout", "init", "batch", "order"})
    seen.insert(derive_seed(0, s));
  CHECK(seen.size() == 7);
}

TEST_CASE("uniform stays in [0, 1) and uniform_index in range") {
  Rng r(1);
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.uniform_index(3) < 3);
  }
}

TEST_CASE("normal moments are close to the standard normal") {
  Rng r(2);
  const int n = 200000;
  double s = 0, s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    s += x;
    s2 += x * x;
  }
  const double mean = s / n, var = s2 / n - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(n));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("uniform_index is unbiased across buckets") {
  Rng r(3);
  std::vector<int> counts(5, 0);
  const int n = 50000;
  for (int i = 0; i < n; ++i) ++counts[r.uniform_index(5)];
  // binomial sd = sqrt(n * 0.2 * 0.8) ~ 89
  for (int c : counts) CHECK(std::abs(c - n / 5) < 4 * 90);
}

TEST_CASE("split streams are deterministic") {
  Rng a(9), b(9);
  Rng ca = a.split("episode"), cb = b.split("episode");
  CHECK(ca.next_u64() == cb.next_u64());
}
