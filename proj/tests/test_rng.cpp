#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "hisac/rng.hpp"

using namespace hisac;

TEST_CASE("derive_seed is deterministic and salt-sensitive") {
  const auto a = derive_seed(1, {7, 3});
  const auto b = derive_seed(1, {7, 3});
  CHECK(a == b);
  CHECK(derive_seed(1, {7, 3}) != derive_seed(1, {3, 7}));
  CHECK(derive_seed(1, {7, 3}) != derive_seed(2, {7, 3}));
  CHECK(derive_seed(1, {7}) != derive_seed(1, {7, 0}));

  std::set<std::uint64_t> seen;
  for (std::uint64_t trial = 0; trial < 64; ++trial)
    for (std::uint64_t slot = 0; slot < 8; ++slot)
      seen.insert(derive_seed(42, {trial, slot, seed_purpose::kNoise}));
  CHECK(seen.size() == 64 * 8);
}

TEST_CASE("RandomStream replays exactly for a fixed seed") {
  RandomStream a(123456789);
  RandomStream b(123456789);
  for (int i = 0; i < 1000; ++i) {
    CHECK(a.uniform() == b.uniform());
    CHECK(a.gaussian() == b.gaussian());
    CHECK(a.complex_gaussian(2.0) == b.complex_gaussian(2.0));
  }
}

TEST_CASE("uniform stays inside its interval") {
  RandomStream rs(7);
  for (int i = 0; i < 10000; ++i) {
    const double u = rs.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = rs.uniform(-3.0, 5.0);
    CHECK(v >= -3.0);
    CHECK(v < 5.0);
  }
}

TEST_CASE("gaussian moments match the standard normal") {
  RandomStream rs(99);
  const int n = 200000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double g = rs.gaussian();
    sum += g;
    sq += g * g;
  }
  CHECK(sum / n == doctest::Approx(0.0).epsilon(0.02));
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("complex_gaussian hits the requested variance") {
  RandomStream rs(5);
  const int n = 100000;
  double energy = 0.0;
  for (int i = 0; i < n; ++i) energy += std::norm(rs.complex_gaussian(0.5));
  CHECK(energy / n == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("different seeds give different streams") {
  RandomStream a(1);
  RandomStream b(2);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += a.uniform() == b.uniform();
  CHECK(same == 0);
}
