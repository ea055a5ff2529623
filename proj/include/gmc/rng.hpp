#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace gmc {

/// Deterministic random source. mt19937_64 output is fully specified by the
/// standard, but the standard distributions are not, so the distributions
/// here are hand-rolled to make every stream bit-identical across platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent substream: same (seed, stream_id) always yields the same
  /// sequence regardless of what other streams consumed.
  Rng(std::uint64_t seed, std::uint64_t stream_id)
      : engine_(mix(seed, stream_id)) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Standard normal via Box-Muller; second value cached.
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  /// Uniform integer in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n);

  /// Fisher-Yates shuffle, in place.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::vector<double> normal_vector(std::size_t n, double mean = 0.0,
                                    double stddev = 1.0);

 private:
  static std::uint64_t mix(std::uint64_t seed, std::uint64_t stream_id);

  std::mt19937_64 engine_;
  bool has_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace gmc
