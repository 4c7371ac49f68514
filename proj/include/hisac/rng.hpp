#pragma once

#include <cstdint>
#include <random>

#include "hisac/types.hpp"

namespace hisac {

// Salt tags used when deriving per-purpose sub-seeds, so that e.g. the noise
// stream of one slice never aliases the offset stream of another trial.
namespace seed_purpose {
inline constexpr std::uint64_t kScene = 0x5ce9e1;
inline constexpr std::uint64_t kOffsets = 0x0ff5e7;
inline constexpr std::uint64_t kNoise = 0x9015e;
inline constexpr std::uint64_t kBaselineNoise = 0xba5e11;
}  // namespace seed_purpose

std::uint64_t splitmix64(std::uint64_t x);

// Hash a master seed with any number of salts (trial, subsystem, slot, ...).
std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> salts);

// Deterministic random stream built on mt19937_64. Gaussians use an explicit
// Box-Muller transform because std::normal_distribution is not guaranteed to
// produce the same values across standard library implementations.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform();
  // Uniform in [lo, hi).
  double uniform(double lo, double hi);
  // Standard normal.
  double gaussian();
  // Complex sample with E|w|^2 = variance (independent re/im parts).
  cplx complex_gaussian(double variance);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace hisac
