#include "hisac/rng.hpp"

#include <cmath>

namespace hisac {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> salts) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t s : salts) h = splitmix64(h ^ (s + 0x9e3779b97f4a7c15ULL));
  return h;
}

double RandomStream::uniform() {
  // 53 random bits -> double in [0, 1).
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomStream::uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }

double RandomStream::gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1], keeps the log finite
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = kTwoPi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

cplx RandomStream::complex_gaussian(double variance) {
  const double scale = std::sqrt(variance / 2.0);
  const double re = gaussian();
  const double im = gaussian();
  return {scale * re, scale * im};
}

}  // namespace hisac
