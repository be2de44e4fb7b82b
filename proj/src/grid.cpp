#include "rvm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace rvm {

Grid3::Grid3(double L, int n) : L_(L), n_(n), h_(L / n) {
  if (!(L > 0.0) || !std::isfinite(L)) throw std::invalid_argument("Grid3: L must be positive");
  if (n < 8) throw std::invalid_argument("Grid3: n must be >= 8 per axis");
}

double Grid3::max_dt() const { return h_ / std::sqrt(3.0); }

void Grid3::check_cfl(double dt) const {
  if (!(dt > 0.0) || dt > max_dt() * (1.0 + 1e-12)) {
    std::ostringstream msg;
    msg << "CFL violated: dt = " << dt << " must satisfy 0 < dt <= h/sqrt(3) = " << max_dt();
    throw std::invalid_argument(msg.str());
  }
}

Vec3 stagger_offset(Component c) {
  switch (c) {
    case Ex: return {0.5, 0.0, 0.0};
    case Ey: return {0.0, 0.5, 0.0};
    case Ez: return {0.0, 0.0, 0.5};
    case Bx: return {0.0, 0.5, 0.5};
    case By: return {0.5, 0.0, 0.5};
    case Bz: return {0.5, 0.5, 0.0};
  }
  return Vec3::Zero();
}

Sources::Sources(const Grid3& g) : rho(g.size(), 0.0) {
  for (auto& v : j) v.assign(g.size(), 0.0);
}

void Sources::zero() {
  std::fill(rho.begin(), rho.end(), 0.0);
  for (auto& v : j) std::fill(v.begin(), v.end(), 0.0);
}

FieldState::FieldState(const Grid3& grid) : grid_(grid) {
  for (auto& v : data_) v.assign(grid.size(), 0.0);
}

void FieldState::zero() {
  for (auto& v : data_) std::fill(v.begin(), v.end(), 0.0);
}

double FieldState::sample_component(Component c, const Vec3& x) const {
  const double h = grid_.h();
  const Vec3 off = stagger_offset(c);
  int i0[3];
  double a[3];
  for (int d = 0; d < 3; ++d) {
    const double xi = (x[d] - grid_.lo()) / h - off[d];
    const double fl = std::floor(xi);
    i0[d] = static_cast<int>(fl);
    a[d] = xi - fl;
  }
  const auto& v = data_[c];
  double sum = 0.0;
  for (int di = 0; di < 2; ++di) {
    const double wx = di ? a[0] : 1.0 - a[0];
    for (int dj = 0; dj < 2; ++dj) {
      const double wy = dj ? a[1] : 1.0 - a[1];
      for (int dk = 0; dk < 2; ++dk) {
        const double wz = dk ? a[2] : 1.0 - a[2];
        sum += wx * wy * wz * v[grid_.index(i0[0] + di, i0[1] + dj, i0[2] + dk)];
      }
    }
  }
  return sum;
}

EMField FieldState::sample(const Vec3& x) const {
  EMField K;
  for (int c = 0; c < 3; ++c) {
    K.E[c] = sample_component(static_cast<Component>(c), x);
    K.B[c] = sample_component(static_cast<Component>(c + 3), x);
  }
  return K;
}

namespace {

// Lagrange weights for nodes -1, 0, 1, 2 at fractional position a in [0, 1).
void cubic_weights(double a, double w[4]) {
  w[0] = -a * (a - 1.0) * (a - 2.0) / 6.0;
  w[1] = (a + 1.0) * (a - 1.0) * (a - 2.0) / 2.0;
  w[2] = -(a + 1.0) * a * (a - 2.0) / 2.0;
  w[3] = (a + 1.0) * a * (a - 1.0) / 6.0;
}

}  // namespace

EMField FieldState::sample_cubic(const Vec3& x) const {
  const double h = grid_.h();
  EMField K;
  for (int c = 0; c < 6; ++c) {
    const Vec3 off = stagger_offset(static_cast<Component>(c));
    int i0[3];
    double w[3][4];
    for (int d = 0; d < 3; ++d) {
      const double xi = (x[d] - grid_.lo()) / h - off[d];
      const double fl = std::floor(xi);
      i0[d] = static_cast<int>(fl);
      cubic_weights(xi - fl, w[d]);
    }
    const auto& v = data_[c];
    double sum = 0.0;
    for (int di = 0; di < 4; ++di)
      for (int dj = 0; dj < 4; ++dj)
        for (int dk = 0; dk < 4; ++dk)
          sum += w[0][di] * w[1][dj] * w[2][dk] *
                 v[grid_.index(i0[0] + di - 1, i0[1] + dj - 1, i0[2] + dk - 1)];
    (c < 3 ? K.E[c] : K.B[c - 3]) = sum;
  }
  return K;
}

double FieldState::energy(const Executor& ex) const {
  const std::size_t n = grid_.size();
  const double s = ordered_sum(ex, n, [&](std::size_t i) {
    double e = 0.0;
    for (const auto& v : data_) e += v[i] * v[i];
    return e;
  });
  return 0.5 * s * grid_.cell_volume();
}

std::vector<double> FieldState::div_B() const {
  const int n = grid_.n();
  const double inv = 1.0 / grid_.h();
  std::vector<double> out(grid_.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out[grid_.index(i, j, k)] =
            ((at(Bx, i + 1, j, k) - at(Bx, i, j, k)) + (at(By, i, j + 1, k) - at(By, i, j, k)) +
             (at(Bz, i, j, k + 1) - at(Bz, i, j, k))) *
            inv;
  return out;
}

std::vector<double> FieldState::div_E() const {
  const int n = grid_.n();
  const double inv = 1.0 / grid_.h();
  std::vector<double> out(grid_.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        out[grid_.index(i, j, k)] =
            ((at(Ex, i, j, k) - at(Ex, i - 1, j, k)) + (at(Ey, i, j, k) - at(Ey, i, j - 1, k)) +
             (at(Ez, i, j, k) - at(Ez, i, j, k - 1))) *
            inv;
  return out;
}

double FieldState::max_abs_div_B() const {
  double m = 0.0;
  for (double v : div_B()) m = std::max(m, std::abs(v));
  return m;
}

bool FieldState::all_finite() const {
  for (const auto& v : data_)
    for (double x : v)
      if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace rvm
