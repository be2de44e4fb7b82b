#include "rvm/electrostatics.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace rvm {

namespace {

// FFTW planning is not thread-safe.
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

// Mean of 1/|r| over the unit cube centred at the origin.
constexpr double kCubeMeanInverseDistance = 2.3800772;

}  // namespace

std::vector<double> free_space_potential(const std::vector<double>& rho, const Grid3& g) {
  if (rho.size() != g.size()) throw std::invalid_argument("free_space_potential: size mismatch");
  const int n = g.n(), m = 2 * n;
  const std::size_t real_size = static_cast<std::size_t>(m) * m * m;
  const std::size_t cplx_size = static_cast<std::size_t>(m) * m * (m / 2 + 1);
  const double h = g.h();

  double* buf = fftw_alloc_real(real_size);
  double* gbuf = fftw_alloc_real(real_size);
  fftw_complex* rk = fftw_alloc_complex(cplx_size);
  fftw_complex* gk = fftw_alloc_complex(cplx_size);
  auto idx = [m](int i, int j, int k) { return (static_cast<std::size_t>(i) * m + j) * m + k; };

  for (std::size_t i = 0; i < real_size; ++i) buf[i] = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) buf[idx(i, j, k)] = rho[g.index(i, j, k)];

  const double inv4pi = 1.0 / (4.0 * std::numbers::pi);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k) {
        const int a = i <= n ? i : i - m, b = j <= n ? j : j - m, c = k <= n ? k : k - m;
        const double r = h * std::sqrt(double(a) * a + double(b) * b + double(c) * c);
        gbuf[idx(i, j, k)] = r > 0.0 ? inv4pi / r : inv4pi * kCubeMeanInverseDistance / h;
      }

  fftw_plan fr, fg, bwd;
  {
    std::lock_guard lock(plan_mutex());
    fr = fftw_plan_dft_r2c_3d(m, m, m, buf, rk, FFTW_ESTIMATE);
    fg = fftw_plan_dft_r2c_3d(m, m, m, gbuf, gk, FFTW_ESTIMATE);
    bwd = fftw_plan_dft_c2r_3d(m, m, m, rk, buf, FFTW_ESTIMATE);
  }
  fftw_execute(fr);
  fftw_execute(fg);
  const double scale = h * h * h / static_cast<double>(real_size);
  for (std::size_t i = 0; i < cplx_size; ++i) {
    const std::complex<double> a(rk[i][0], rk[i][1]), b(gk[i][0], gk[i][1]);
    const std::complex<double> c = a * b * scale;
    rk[i][0] = c.real();
    rk[i][1] = c.imag();
  }
  fftw_execute(bwd);

  std::vector<double> phi(buf, buf + real_size);
  {
    std::lock_guard lock(plan_mutex());
    fftw_destroy_plan(fr);
    fftw_destroy_plan(fg);
    fftw_destroy_plan(bwd);
  }
  fftw_free(buf);
  fftw_free(gbuf);
  fftw_free(rk);
  fftw_free(gk);
  return phi;
}

void set_electrostatic_field(const std::vector<double>& rho, FieldState& f) {
  const Grid3& g = f.grid();
  const std::vector<double> phi = free_space_potential(rho, g);
  const int n = g.n(), m = 2 * n;
  auto P = [&](int i, int j, int k) {
    return phi[(static_cast<std::size_t>(i) * m + j) * m + k];
  };
  const double inv = 1.0 / g.h();
  f.zero();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const std::size_t id = g.index(i, j, k);
        f[Ex][id] = -(P(i + 1, j, k) - P(i, j, k)) * inv;
        f[Ey][id] = -(P(i, j + 1, k) - P(i, j, k)) * inv;
        f[Ez][id] = -(P(i, j, k + 1) - P(i, j, k)) * inv;
      }
}

}  // namespace rvm
