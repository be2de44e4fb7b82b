#pragma once
// Hand-rolled generators for property tests. Case i of a property draws
// from its own stream, so a failure report names a reproducible case.

#include <cmath>
#include <cstdint>
#include <numbers>

#include "rvm/random.hpp"
#include "rvm/relkin.hpp"

namespace gen {

using rvm::Momentum;
using rvm::SplitMix64;
using rvm::Vec3;

inline SplitMix64 stream(std::uint64_t seed, std::uint64_t i) { return SplitMix64(seed, i); }

inline double log_uniform(SplitMix64& r, double lo, double hi) {
  return std::exp(r.uniform(std::log(lo), std::log(hi)));
}

inline Vec3 unit(SplitMix64& r) { return r.unit_vector(); }

inline Vec3 vec(SplitMix64& r, double scale) {
  return Vec3(r.uniform(-scale, scale), r.uniform(-scale, scale), r.uniform(-scale, scale));
}

/// |p| log-uniform in [lo, hi], isotropic direction.
inline Momentum momentum(SplitMix64& r, double lo = 1e-3, double hi = 1e3) {
  const double m = log_uniform(r, lo, hi);
  return Momentum(m * r.unit_vector());
}

/// Direction at angle theta (log-uniform down to theta_min) from -p/|p|.
inline Vec3 near_antipodal(SplitMix64& r, const Momentum& p, double theta_min = 1e-6) {
  const double th = log_uniform(r, theta_min, std::numbers::pi);
  return rvm::rotate_away(-p.vec().normalized(), th, r.uniform(0.0, 2.0 * std::numbers::pi));
}

/// Either uniform or near-antipodal, half and half.
inline Vec3 direction(SplitMix64& r, const Momentum& p) {
  return r.uniform() < 0.5 ? r.unit_vector() : near_antipodal(r, p);
}

}  // namespace gen
