#include "rvm/maxwell.hpp"

#include <array>

namespace rvm {

namespace {

// curl E at the B locations, for the slab of first index i.
std::array<double, 3> curl_E_at(const FieldState& f, int i, int j, int k, double inv) {
  return {((f.at(Ez, i, j + 1, k) - f.at(Ez, i, j, k)) - (f.at(Ey, i, j, k + 1) - f.at(Ey, i, j, k))) * inv,
          ((f.at(Ex, i, j, k + 1) - f.at(Ex, i, j, k)) - (f.at(Ez, i + 1, j, k) - f.at(Ez, i, j, k))) * inv,
          ((f.at(Ey, i + 1, j, k) - f.at(Ey, i, j, k)) - (f.at(Ex, i, j + 1, k) - f.at(Ex, i, j, k))) * inv};
}

std::array<double, 3> curl_B_at(const FieldState& f, int i, int j, int k, double inv) {
  return {((f.at(Bz, i, j, k) - f.at(Bz, i, j - 1, k)) - (f.at(By, i, j, k) - f.at(By, i, j, k - 1))) * inv,
          ((f.at(Bx, i, j, k) - f.at(Bx, i, j, k - 1)) - (f.at(Bz, i, j, k) - f.at(Bz, i - 1, j, k))) * inv,
          ((f.at(By, i, j, k) - f.at(By, i - 1, j, k)) - (f.at(Bx, i, j, k) - f.at(Bx, i, j - 1, k))) * inv};
}

}  // namespace

// Each slab reads E (resp. B) and writes only B (resp. E) at its own index,
// so slabs are independent and the result does not depend on scheduling.
void advance_B(FieldState& f, double dt, const Executor& ex) {
  const Grid3& g = f.grid();
  const int n = g.n();
  const double inv = 1.0 / g.h();
  ex.for_each_task(n, [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const auto c = curl_E_at(f, i, j, k, inv);
        const std::size_t id = g.index(i, j, k);
        f[Bx][id] -= dt * c[0];
        f[By][id] -= dt * c[1];
        f[Bz][id] -= dt * c[2];
      }
  });
}

void advance_E(FieldState& f, const Sources* src, double dt, const Executor& ex) {
  const Grid3& g = f.grid();
  const int n = g.n();
  const double inv = 1.0 / g.h();
  ex.for_each_task(n, [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const auto c = curl_B_at(f, i, j, k, inv);
        const std::size_t id = g.index(i, j, k);
        for (int d = 0; d < 3; ++d) {
          double rate = c[d];
          if (src) rate -= src->j[d][id];
          f[static_cast<Component>(d)][id] += dt * rate;
        }
      }
  });
}

void maxwell_step(FieldState& f, const Sources* src, double dt, const Executor& ex) {
  f.grid().check_cfl(dt);
  advance_B(f, 0.5 * dt, ex);
  advance_E(f, src, dt, ex);
  advance_B(f, 0.5 * dt, ex);
  f.t += dt;
}

double leapfrog_invariant(const FieldState& f, double dt) {
  const Grid3& g = f.grid();
  const int n = g.n();
  const double inv = 1.0 / g.h();
  double curl2 = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const auto c = curl_E_at(f, i, j, k, inv);
        curl2 += c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
      }
  return f.energy() - 0.125 * dt * dt * curl2 * g.cell_volume();
}

std::vector<double> continuity_residual(const Grid3& g, const std::vector<double>& rho0,
                                        const std::vector<double>& rho1, const Sources& s,
                                        double dt) {
  const int n = g.n();
  const double inv = 1.0 / g.h();
  std::vector<double> out(g.size());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const std::size_t id = g.index(i, j, k);
        const double div = ((s.j[0][id] - s.j[0][g.index(i - 1, j, k)]) +
                            (s.j[1][id] - s.j[1][g.index(i, j - 1, k)]) +
                            (s.j[2][id] - s.j[2][g.index(i, j, k - 1)])) *
                           inv;
        out[id] = (rho1[id] - rho0[id]) / dt + div;
      }
  return out;
}

}  // namespace rvm
