#include "gmc/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace gmc {

double Rng::normal() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  // Box-Muller; u1 bounded away from 0 so log stays finite.
  double u1 = uniform01();
  if (u1 < 0x1.0p-53) u1 = 0x1.0p-53;
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  cached_ = r * std::sin(theta);
  has_cached_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
  // Rejection sampling over the largest multiple of n, so the result is
  // unbiased and depends only on the engine stream.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

std::vector<double> Rng::normal_vector(std::size_t n, double mean,
                                       double stddev) {
  std::vector<double> out(n);
  for (auto& v : out) v = normal(mean, stddev);
  return out;
}

std::uint64_t Rng::mix(std::uint64_t seed, std::uint64_t stream_id) {
  // splitmix64 finalizer over the pair; decorrelates nearby seeds.
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream_id + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace gmc
