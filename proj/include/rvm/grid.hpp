#pragma once

// Periodic cubic grid and the staggered (Yee) field state living on it.
//
// The box is [-L/2, L/2)^3 with node (i, j, k) at -L/2 + (i, j, k) h.
// Component locations in units of h relative to node (i, j, k):
//   Ex (1/2, 0, 0)  Ey (0, 1/2, 0)  Ez (0, 0, 1/2)
//   Bx (0, 1/2, 1/2)  By (1/2, 0, 1/2)  Bz (1/2, 1/2, 0)
// rho lives on nodes; the current j is co-located with E.

#include <array>
#include <cstddef>
#include <vector>

#include "rvm/parallel.hpp"
#include "rvm/relkin.hpp"

namespace rvm {

class Grid3 {
 public:
  /// Throws std::invalid_argument unless L > 0 and n >= 8.
  Grid3(double L, int n);

  double L() const { return L_; }
  int n() const { return n_; }
  double h() const { return h_; }
  double lo() const { return -0.5 * L_; }
  double cell_volume() const { return h_ * h_ * h_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_ * n_; }

  int wrap(int i) const {
    i %= n_;
    return i < 0 ? i + n_ : i;
  }
  std::size_t index(int i, int j, int k) const {
    return (static_cast<std::size_t>(wrap(i)) * n_ + wrap(j)) * n_ + wrap(k);
  }
  Vec3 node(int i, int j, int k) const { return Vec3(lo() + i * h_, lo() + j * h_, lo() + k * h_); }

  /// Largest stable leapfrog step, h / sqrt(3).
  double max_dt() const;
  /// Throws std::invalid_argument naming the limit when dt > h / sqrt(3).
  void check_cfl(double dt) const;

  bool operator==(const Grid3& o) const { return L_ == o.L_ && n_ == o.n_; }

 private:
  double L_;
  int n_;
  double h_;
};

enum Component : int { Ex = 0, Ey, Ez, Bx, By, Bz };

inline constexpr std::array<const char*, 6> kComponentNames = {"Ex", "Ey", "Ez", "Bx", "By", "Bz"};

/// Location of a component relative to its node, in units of h.
Vec3 stagger_offset(Component c);

struct Sources {
  std::vector<double> rho;  ///< nodes
  std::array<std::vector<double>, 3> j;  ///< Ex/Ey/Ez locations

  Sources() = default;
  explicit Sources(const Grid3& g);
  void zero();
};

class FieldState {
 public:
  explicit FieldState(const Grid3& grid);

  const Grid3& grid() const { return grid_; }
  double t = 0.0;

  std::vector<double>& operator[](Component c) { return data_[c]; }
  const std::vector<double>& operator[](Component c) const { return data_[c]; }

  double at(Component c, int i, int j, int k) const { return data_[c][grid_.index(i, j, k)]; }
  double& at(Component c, int i, int j, int k) { return data_[c][grid_.index(i, j, k)]; }

  void zero();

  /// Trilinear interpolation of each staggered component (periodic).
  EMField sample(const Vec3& x) const;
  /// Tricubic Lagrange interpolation (4 points per axis).
  EMField sample_cubic(const Vec3& x) const;
  double sample_component(Component c, const Vec3& x) const;

  /// 1/2 sum (|E|^2 + |B|^2) h^3.
  double energy(const Executor& ex = Executor{}) const;

  /// Discrete divergence of B at cell centres.
  std::vector<double> div_B() const;
  /// Discrete divergence of E at nodes.
  std::vector<double> div_E() const;
  double max_abs_div_B() const;

  bool all_finite() const;

 private:
  Grid3 grid_;
  std::array<std::vector<double>, 6> data_;
};

}  // namespace rvm
