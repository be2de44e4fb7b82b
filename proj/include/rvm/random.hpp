#pragma once

// Counter-based seeding: every sample index gets its own stream derived from
// (seed, index), so sampled results do not depend on how work is split.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>

#include "rvm/relkin.hpp"

namespace rvm {

/// SplitMix64; satisfies UniformRandomBitGenerator so it can drive the
/// <random> distributions.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}
  SplitMix64(std::uint64_t seed, std::uint64_t stream)
      : state_(seed ^ (0xD1B54A32D192ED03ull * (stream + 1))) {
    (*this)();
  }

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  /// Standard normal via Box-Muller (no cached second value, so the stream
  /// position is a pure function of the number of calls).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  Vec3 unit_vector() {
    const double z = uniform(-1.0, 1.0);
    const double phi = uniform(0.0, 2.0 * std::numbers::pi);
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return {r * std::cos(phi), r * std::sin(phi), z};
  }

 private:
  std::uint64_t state_;
};

/// A unit vector at angle theta from the unit vector axis, azimuth phi.
inline Vec3 rotate_away(const Vec3& axis, double theta, double phi) {
  const Vec3 a = axis.normalized();
  const Vec3 helper = std::abs(a.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
  const Vec3 e1 = a.cross(helper).normalized();
  const Vec3 e2 = a.cross(e1);
  return (std::cos(theta) * a + std::sin(theta) * (std::cos(phi) * e1 + std::sin(phi) * e2))
      .normalized();
}

}  // namespace rvm
