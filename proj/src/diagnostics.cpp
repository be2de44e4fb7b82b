#include "rvm/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace rvm::diagnostics {

Exponent::Exponent(double q) : q_(q), infinite_(false) {
  if (std::isinf(q) && q > 0) {
    infinite_ = true;
    q_ = 0.0;
  } else if (!(q >= 1.0)) {
    throw std::invalid_argument("Exponent: q must lie in [1, inf]");
  }
}

std::string Exponent::str() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os << q_;
  return os.str();
}

std::string BinningGrid::id() const {
  std::ostringstream os;
  os << "bin" << m << "_L" << L;
  return os.str();
}

std::vector<double> cell_densities(const std::vector<Vec3>& x, const std::vector<double>& values,
                                   const BinningGrid& grid, const Executor& ex) {
  const int m = grid.m;
  if (m < 1) throw std::invalid_argument("BinningGrid: m must be >= 1");
  if (x.size() != values.size())
    throw std::invalid_argument("cell_densities: one value per particle required");
  const std::size_t cells = static_cast<std::size_t>(m) * m * m;
  const double inv_vol = 1.0 / (grid.h() * grid.h() * grid.h());
  const std::size_t n = x.size();
  std::vector<std::vector<double>> lanes(kDepositLanes);
  ex.for_each_task(kDepositLanes, [&](std::size_t l) {
    auto& buf = lanes[l];
    buf.assign(cells, 0.0);
    const std::size_t lo = l * n / kDepositLanes, hi = (l + 1) * n / kDepositLanes;
    for (std::size_t k = lo; k < hi; ++k) {
      std::size_t id = 0;
      for (int d = 0; d < 3; ++d) {
        int i = static_cast<int>(std::floor((x[k][d] - grid.lo) / grid.h()));
        i %= m;
        if (i < 0) i += m;
        id = id * m + i;
      }
      buf[id] += values[k];
    }
  });
  std::vector<double> out(cells, 0.0);
  for (std::size_t c = 0; c < cells; ++c) {
    double s = 0.0;
    for (int l = 0; l < kDepositLanes; ++l) s += lanes[l][c];
    out[c] = s * inv_vol;
  }
  return out;
}

std::vector<double> cell_densities(const ParticleEnsemble& ens, double theta,
                                   const BinningGrid& grid, const Executor& ex) {
  std::vector<double> v(ens.size());
  for (std::size_t k = 0; k < ens.size(); ++k)
    v[k] = ens.w[k] * std::pow(p0(Momentum(ens.p[k])), theta);
  return cell_densities(ens.x, v, grid, ex);
}

double lq_norm(const std::vector<double>& density, double q, double cell_volume) {
  if (std::isinf(q)) {
    double m = 0.0;
    for (double v : density) m = std::max(m, std::abs(v));
    return m;
  }
  if (!(q > 0.0)) throw std::invalid_argument("lq_norm: exponent must be positive");
  double s = 0.0;
  for (double v : density) s += std::pow(std::abs(v), q);
  return std::pow(s * cell_volume, 1.0 / q);
}

double moment(const ParticleEnsemble& ens, double N, const Executor& ex) {
  const double v = ordered_sum(ex, ens.size(), [&](std::size_t k) {
    return ens.w[k] * std::pow(p0(Momentum(ens.p[k])), N);
  });
  if (!std::isfinite(v)) {
    std::ostringstream msg;
    msg << "moment: order " << N << " overflows";
    throw std::overflow_error(msg.str());
  }
  return v;
}

double weighted_norm(const ParticleEnsemble& ens, const NormSpec& spec, const Executor& ex) {
  if (ens.size() == 0) return 0.0;
  if (!spec.q.is_infinite() && spec.q.value() == 1.0) return moment(ens, spec.theta, ex);
  const double h = spec.grid.h();
  return lq_norm(cell_densities(ens, spec.theta, spec.grid, ex), spec.q.value(), h * h * h);
}

double total_energy(const FieldState& fields, const ParticleEnsemble& ens, const Executor& ex) {
  return fields.energy(ex) + 4.0 * std::numbers::pi * moment(ens, 1.0, ex);
}

namespace {

double norm_any(const ParticleEnsemble& ens, double theta, double q, const BinningGrid& grid,
                const Executor& ex) {
  if (ens.size() == 0) return 0.0;
  if (q == 1.0) return moment(ens, theta, ex);
  const double h = grid.h();
  return lq_norm(cell_densities(ens, theta, grid, ex), q, h * h * h);
}

}  // namespace

InequalityValue check_interpolation(const ParticleEnsemble& ens, double S, double M, double q,
                                    const BinningGrid& grid, const Executor& ex) {
  if (!(S > -3.0)) throw std::invalid_argument("check_interpolation: requires S > -3");
  if (!(M >= S)) throw std::invalid_argument("check_interpolation: requires M >= S");
  if (!(q >= 1.0) || std::isinf(q))
    throw std::invalid_argument("check_interpolation: requires 1 <= q < inf");
  const double a = (S + 3.0) / (M + 3.0);
  InequalityValue v;
  v.lhs = norm_any(ens, S, q, grid, ex);
  v.rhs = std::pow(norm_any(ens, M, a * q, grid, ex), a);
  return v;
}

InequalityValue check_interpolation_special(const ParticleEnsemble& ens, double S, double M,
                                            const BinningGrid& grid, const Executor& ex) {
  if (!(S > -3.0) || !(M >= S))
    throw std::invalid_argument("check_interpolation_special: requires M >= S > -3");
  const double q = (M + 3.0) / (S + 3.0);
  InequalityValue v;
  v.lhs = norm_any(ens, S, q, grid, ex);
  v.rhs = std::pow(moment(ens, M, ex), (S + 3.0) / (M + 3.0));
  return v;
}

void validate_prop81(const Prop81Spec& s) {
  if (!(s.eta > 0.0 && s.rho > 0.0 && s.sigma > 0.0))
    throw std::invalid_argument("Prop81Spec: eta, rho, sigma must be positive");
  if (!(s.q >= 1.0)) throw std::invalid_argument("Prop81Spec: q must be >= 1");
  const double qe = s.q * s.eta;
  if (!(qe > 0.0 && qe < 1.0))
    throw std::invalid_argument("Prop81Spec: violates 0 < q*eta < 1");
  const double need = (s.rho - s.eta * (s.N + 3.0 - 3.0 * s.q)) / (1.0 - qe);
  if (!(s.sigma >= need)) {
    std::ostringstream msg;
    msg << "Prop81Spec: violates sigma >= (rho - eta (N + 3 - 3q)) / (1 - q eta) = " << need;
    throw std::invalid_argument(msg.str());
  }
}

InequalityValue check_prop81(const ParticleEnsemble& ens, const Prop81Spec& s,
                             const BinningGrid& grid, const Executor& ex) {
  validate_prop81(s);
  InequalityValue v;
  v.lhs = norm_any(ens, s.rho, s.q, grid, ex);
  v.rhs = std::pow(norm_any(ens, s.sigma, s.q, grid, ex), 1.0 - s.q * s.eta) *
          std::pow(moment(ens, s.N, ex), s.eta);
  return v;
}

FieldNorms field_lr_norms(const FieldState& f, double r) {
  const Grid3& g = f.grid();
  const int n = g.n();
  double sE = 0.0, sB = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 E(0.5 * (f.at(Ex, i - 1, j, k) + f.at(Ex, i, j, k)),
                     0.5 * (f.at(Ey, i, j - 1, k) + f.at(Ey, i, j, k)),
                     0.5 * (f.at(Ez, i, j, k - 1) + f.at(Ez, i, j, k)));
        const Vec3 B(0.25 * (f.at(Bx, i, j, k) + f.at(Bx, i, j - 1, k) + f.at(Bx, i, j, k - 1) +
                             f.at(Bx, i, j - 1, k - 1)),
                     0.25 * (f.at(By, i, j, k) + f.at(By, i - 1, j, k) + f.at(By, i, j, k - 1) +
                             f.at(By, i - 1, j, k - 1)),
                     0.25 * (f.at(Bz, i, j, k) + f.at(Bz, i - 1, j, k) + f.at(Bz, i, j - 1, k) +
                             f.at(Bz, i - 1, j - 1, k)));
        sE += std::pow(E.norm(), r);
        sB += std::pow(B.norm(), r);
      }
  const double dv = g.cell_volume();
  return {std::pow(sE * dv, 1.0 / r), std::pow(sB * dv, 1.0 / r)};
}

std::vector<MomentEstimatePoint> check_moment_estimate(const std::vector<MomentSample>& run,
                                                       double N) {
  std::vector<MomentEstimatePoint> out;
  if (run.empty()) return out;
  const double m0 = run.front().moment;
  double lhs = 0.0, intE = 0.0, intB = 0.0;
  for (std::size_t i = 0; i < run.size(); ++i) {
    if (i > 0) {
      const double dt = run[i].t - run[i - 1].t;
      intE += 0.5 * dt * (run[i].E_norm + run[i - 1].E_norm);
      intB += 0.5 * dt * (run[i].B_norm + run[i - 1].B_norm);
    }
    lhs = std::max(lhs, run[i].moment);
    out.push_back({run[i].t, lhs, m0 + std::pow(intE, N + 3.0) + std::pow(intB, N + 3.0)});
  }
  return out;
}

}  // namespace rvm::diagnostics
