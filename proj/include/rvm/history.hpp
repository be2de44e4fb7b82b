#pragma once

// Retarded-time storage for cone evaluations: per-snapshot particle phase
// coordinates plus the fields each particle saw, in single precision.

#include <cstddef>
#include <deque>
#include <vector>

#include "rvm/relkin.hpp"

namespace rvm {

using Vec3f = Eigen::Vector3f;

/// How the stored run was initialized. Consistent means E0 is the
/// free-space electrostatic field of the initial charge and B0 = 0 (this
/// includes zero fields with an empty ensemble).
enum class InitialData { Consistent, Unspecified };

struct ParticleSnapshot {
  double t = 0.0;
  std::vector<Vec3f> x;  ///< unwrapped positions
  std::vector<Vec3f> p;
  std::vector<Vec3f> E;  ///< field sampled at x
  std::vector<Vec3f> B;
};

class HistoryBuffer {
 public:
  /// depth: oldest snapshots are evicted once the newer ones alone span
  /// more than this time.
  HistoryBuffer(std::vector<double> weights, double depth, InitialData init);

  /// Snapshots must arrive with strictly increasing time and one entry per
  /// particle.
  void push(ParticleSnapshot snap);

  std::size_t size() const { return snaps_.size(); }
  std::size_t particles() const { return weights_.size(); }
  const std::vector<double>& weights() const { return weights_; }
  const ParticleSnapshot& operator[](std::size_t i) const { return snaps_[i]; }
  double t_begin() const;
  double t_end() const;
  double depth() const { return depth_; }
  double mean_stride() const;
  InitialData initial_data() const { return init_; }

  struct Bracket {
    const ParticleSnapshot* a;
    const ParticleSnapshot* b;
    double frac;  ///< weight of b
  };
  /// Snapshots around time s for linear interpolation. Throws
  /// std::out_of_range naming the covered window when s is not covered.
  Bracket bracket(double s) const;

 private:
  std::vector<double> weights_;
  double depth_;
  InitialData init_;
  std::deque<ParticleSnapshot> snaps_;
};

}  // namespace rvm
