#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace graspforge {

// Seeded generator with platform-independent derived distributions.
// std::mt19937_64 output is fully specified by the standard; the standard
// distributions are not, so the conversions below are done by hand to keep
// every seeded run byte-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, n). Uses rejection to stay unbiased.
  std::uint64_t below(std::uint64_t n);

  /// Standard normal via Box-Muller (one value per call, no caching).
  double normal();

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  template <typename T>
  void shuffle(std::vector<T>& values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

/// Deterministic 64-bit seed derived from a base seed and a label (e.g. a shape id).
std::uint64_t derive_seed(std::uint64_t base, std::string_view label);

}  // namespace graspforge
