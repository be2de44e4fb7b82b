#include "rvm/strichartz.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "rvm/quadrature.hpp"

namespace rvm {

namespace {

double inv(double q) { return std::isinf(q) ? 0.0 : 1.0 / q; }

[[noreturn]] void reject(const std::string& relation, const StrichartzExponents& e) {
  std::ostringstream msg;
  msg << "inadmissible Strichartz exponents (q1=" << e.q1 << ", r1=" << e.r1
      << ", q2'=" << e.q2p << ", r2'=" << e.r2p << "): violates " << relation;
  throw std::invalid_argument(msg.str());
}

// ||a||_{L^q} over samples with measure dv; q = inf gives the max.
double lp(const std::vector<double>& a, double q, double dv) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::abs(v));
    return m;
  }
  double s = 0.0;
  for (double v : a) s += std::pow(std::abs(v), q);
  return std::pow(s * dv, 1.0 / q);
}

// Time norm of per-slice values by the Simpson rule.
double lp_time(const std::vector<double>& slice, const QuadratureRule& rule, double q) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : slice) m = std::max(m, v);
    return m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < slice.size(); ++i) s += rule.weights[i] * std::pow(slice[i], q);
  return std::pow(s, 1.0 / q);
}

}  // namespace

void validate_strichartz(const StrichartzExponents& e) {
  const double r2 = e.r2p / (e.r2p - 1.0);
  if (!(e.q1 >= 2.0)) reject("2 <= q1", e);
  if (!(e.q2p >= 1.0 && e.q2p <= 2.0)) reject("2 <= q2 <= inf (1 <= q2' <= 2)", e);
  if (!(e.r1 >= 2.0 && std::isfinite(e.r1))) reject("2 <= r1 < inf", e);
  if (!(e.r2p > 1.0 && e.r2p <= 2.0) || !(r2 >= 2.0 && std::isfinite(r2)))
    reject("2 <= r2 < inf (1 < r2' <= 2)", e);
  const double lhs = inv(e.q1) + 3.0 / e.r1;
  const double rhs = inv(e.q2p) + 3.0 / e.r2p - 2.0;
  if (std::abs(lhs - rhs) > 1e-12) reject("1/q1 + 3/r1 = 1/q2' + 3/r2' - 2", e);
  if (inv(e.q1) > 0.5 - 1.0 / e.r1 + 1e-12) reject("1/q1 <= 1/2 - 1/r1", e);
  if (inv(e.q2p) < 1.5 - 1.0 / e.r2p - 1e-12) reject("1/q2' >= 3/2 - 1/r2'", e);
}

StrichartzResult strichartz_norms(const SpaceTimeScalar& F, const StrichartzExponents& e,
                                  const StrichartzGrid& grid, double T, const Executor& ex) {
  validate_strichartz(e);
  if (!(T > 0.0)) throw std::invalid_argument("strichartz_ratio: T must be positive");
  if (grid.n_space < 2 || grid.n_time < 2)
    throw std::invalid_argument("strichartz_ratio: window resolution must be >= 2");
  grid.cone.validate();
  const int m = grid.n_space;
  const double hs = 2.0 * grid.half_width / m;
  const double dv = hs * hs * hs;
  const std::size_t cells = static_cast<std::size_t>(m) * m * m;
  std::vector<Vec3> pts(cells);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (int k = 0; k < m; ++k)
        pts[(static_cast<std::size_t>(i) * m + j) * m + k] =
            grid.center + Vec3(-grid.half_width + (i + 0.5) * hs, -grid.half_width + (j + 0.5) * hs,
                               -grid.half_width + (k + 0.5) * hs);

  const QuadratureRule trule = uniform_simpson(grid.n_time, 0.0, T);
  std::vector<double> u_slice(trule.size()), F_slice(trule.size());
  std::vector<double> u(cells), f(cells);
  for (std::size_t n = 0; n < trule.size(); ++n) {
    const double t = trule.nodes[n];
    ex.for_each_task(cells, [&](std::size_t c) {
      u[c] = wave_cone_integral(F, t, pts[c], grid.cone);
      f[c] = F(t, pts[c]);
    });
    u_slice[n] = lp(u, e.r1, dv);
    F_slice[n] = lp(f, e.r2p, dv);
  }
  return {lp_time(u_slice, trule, e.q1), lp_time(F_slice, trule, e.q2p)};
}

double strichartz_ratio(const SpaceTimeScalar& F, const StrichartzExponents& e,
                        const StrichartzGrid& grid, double T, const Executor& ex) {
  const StrichartzResult r = strichartz_norms(F, e, grid, T, ex);
  if (!(r.F_norm > 0.0)) throw std::invalid_argument("strichartz_ratio: source norm is zero");
  return r.ratio();
}

}  // namespace rvm
