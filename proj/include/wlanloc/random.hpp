#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

namespace wlanloc {

/// Seeded generator with a fully specified output sequence. std::mt19937_64 is
/// bit-exact across standard libraries; the distribution adaptors are not, so
/// uniform and normal variates are derived here.
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal via Box-Muller; the sine branch is discarded.
  double normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wlanloc
