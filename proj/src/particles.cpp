#include "rvm/particles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "rvm/maxwell.hpp"
#include "rvm/random.hpp"

namespace rvm {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr std::size_t kParticleBlock = 1024;

template <class F>
void for_particle_blocks(const Executor& ex, std::size_t n, F&& fn) {
  const std::size_t blocks = (n + kParticleBlock - 1) / kParticleBlock;
  ex.for_each_task(blocks, [&](std::size_t b) {
    const std::size_t lo = b * kParticleBlock, hi = std::min(n, lo + kParticleBlock);
    for (std::size_t k = lo; k < hi; ++k) fn(k);
  });
}

void cic_add(std::vector<double>& buf, const Grid3& g, const Vec3& off, const Vec3& x,
             double value) {
  int i0[3];
  double a[3];
  for (int d = 0; d < 3; ++d) {
    const double xi = (x[d] - g.lo()) / g.h() - off[d];
    const double fl = std::floor(xi);
    i0[d] = static_cast<int>(fl);
    a[d] = xi - fl;
  }
  for (int di = 0; di < 2; ++di) {
    const double wx = di ? a[0] : 1.0 - a[0];
    for (int dj = 0; dj < 2; ++dj) {
      const double wy = dj ? a[1] : 1.0 - a[1];
      for (int dk = 0; dk < 2; ++dk) {
        const double wz = dk ? a[2] : 1.0 - a[2];
        buf[g.index(i0[0] + di, i0[1] + dj, i0[2] + dk)] += value * wx * wy * wz;
      }
    }
  }
}

// Lane l owns particles [l N / L, (l + 1) N / L); lanes are merged in lane
// order, so the float sum per cell is fixed regardless of scheduling.
template <class Scatter>
std::vector<std::vector<double>> lane_deposit(std::size_t n_particles, int n_components,
                                              const Grid3& g, const Executor& ex,
                                              Scatter&& scatter) {
  std::vector<std::vector<std::vector<double>>> lanes(kDepositLanes);
  ex.for_each_task(kDepositLanes, [&](std::size_t l) {
    auto& bufs = lanes[l];
    bufs.assign(n_components, std::vector<double>(g.size(), 0.0));
    const std::size_t lo = l * n_particles / kDepositLanes;
    const std::size_t hi = (l + 1) * n_particles / kDepositLanes;
    for (std::size_t k = lo; k < hi; ++k) scatter(k, bufs);
  });
  std::vector<std::vector<double>> out(n_components, std::vector<double>(g.size(), 0.0));
  const std::size_t cells = g.size();
  const std::size_t chunk = 4096;
  ex.for_each_task((cells + chunk - 1) / chunk, [&](std::size_t b) {
    const std::size_t lo = b * chunk, hi = std::min(cells, lo + chunk);
    for (int c = 0; c < n_components; ++c)
      for (std::size_t i = lo; i < hi; ++i) {
        double s = 0.0;
        for (int l = 0; l < kDepositLanes; ++l) s += lanes[l][c][i];
        out[c][i] = s;
      }
  });
  return out;
}

void check_inputs(const std::vector<Vec3>& x, const std::vector<Vec3>* p,
                  const std::vector<double>& w) {
  if (x.size() != w.size() || (p && p->size() != w.size()))
    throw std::invalid_argument("deposit: particle arrays differ in length");
  for (std::size_t k = 0; k < w.size(); ++k) {
    if (!is_finite(x[k]) || (p && !is_finite((*p)[k])) || !std::isfinite(w[k])) {
      std::ostringstream msg;
      msg << "deposit: non-finite state for particle " << k;
      throw std::invalid_argument(msg.str());
    }
  }
}

}  // namespace

double ParticleEnsemble::total_weight(const Executor& ex) const {
  return ordered_sum(ex, w.size(), [&](std::size_t k) { return w[k]; });
}

void ParticleEnsemble::check_finite() const { check_inputs(x, &p, w); }

ParticleEnsemble sample_ensemble(const EnsembleSpec& spec, std::uint64_t seed) {
  if (spec.count == 0) return {};
  if (!(spec.total_weight > 0.0))
    throw std::invalid_argument("sample_ensemble: total_weight must be positive");
  ParticleEnsemble ens;
  ens.x.resize(spec.count);
  ens.p.resize(spec.count);
  ens.w.assign(spec.count, spec.total_weight / static_cast<double>(spec.count));
  for (std::size_t k = 0; k < spec.count; ++k) {
    SplitMix64 rng(seed, k);
    Vec3 x;
    if (spec.space == EnsembleSpec::Space::Uniform) {
      for (int d = 0; d < 3; ++d) x[d] = spec.center[d] + spec.box_L * (rng.uniform() - 0.5);
    } else {
      for (int attempt = 0;; ++attempt) {
        const Vec3 z(rng.normal(), rng.normal(), rng.normal());
        if (spec.x_cutoff <= 0.0 || spec.x_sigma * z.norm() <= spec.x_cutoff || attempt > 1000) {
          x = spec.center + spec.x_sigma * z;
          break;
        }
      }
    }
    Vec3 dp;
    for (int attempt = 0;; ++attempt) {
      Vec3 z(rng.normal(), rng.normal(), rng.normal());
      if (spec.tail_exponent > 0.0) {
        std::gamma_distribution<double> chi2(0.5 * spec.tail_exponent, 2.0);
        z /= std::sqrt(chi2(rng) / spec.tail_exponent);
      }
      dp = spec.p_sigma.cwiseProduct(z);
      if (spec.p_cutoff <= 0.0 || dp.norm() <= spec.p_cutoff || attempt > 1000) break;
    }
    ens.x[k] = x;
    ens.p[k] = spec.p_drift + dp;
  }
  return ens;
}

std::vector<double> deposit_charge(const std::vector<Vec3>& x, const std::vector<double>& w,
                                   const Grid3& g, const Executor& ex) {
  check_inputs(x, nullptr, w);
  const double scale = kFourPi / g.cell_volume();
  const Vec3 node = Vec3::Zero();
  auto out = lane_deposit(w.size(), 1, g, ex, [&](std::size_t k, auto& bufs) {
    cic_add(bufs[0], g, node, x[k], scale * w[k]);
  });
  return std::move(out[0]);
}

void deposit_current(const std::vector<Vec3>& x, const std::vector<Vec3>& p,
                     const std::vector<double>& w, const Grid3& g, Sources& src,
                     const Executor& ex) {
  check_inputs(x, &p, w);
  const double scale = kFourPi / g.cell_volume();
  const Vec3 off[3] = {stagger_offset(Ex), stagger_offset(Ey), stagger_offset(Ez)};
  auto out = lane_deposit(w.size(), 3, g, ex, [&](std::size_t k, auto& bufs) {
    const Vec3 v = vhat(Momentum(p[k]));
    for (int d = 0; d < 3; ++d) cic_add(bufs[d], g, off[d], x[k], scale * w[k] * v[d]);
  });
  for (int d = 0; d < 3; ++d) src.j[d] = std::move(out[d]);
}

void deposit_current_conserving(const std::vector<Vec3>& x_old, const std::vector<Vec3>& x_new,
                                const std::vector<double>& w, const Grid3& g, double dt,
                                Sources& src, const Executor& ex) {
  check_inputs(x_old, &x_new, w);
  if (!(dt > 0.0)) throw std::invalid_argument("deposit_current_conserving: dt must be positive");
  const double h = g.h();
  auto out = lane_deposit(w.size(), 3, g, ex, [&](std::size_t k, auto& bufs) {
    // 1D tent weights on the three nodes i0, i0 + 1, i0 + 2 that cover the
    // supports at both positions (displacements stay below one cell).
    int i0[3];
    double S0[3][3], dS[3][3];
    for (int d = 0; d < 3; ++d) {
      const double u0 = (x_old[k][d] - g.lo()) / h, u1 = (x_new[k][d] - g.lo()) / h;
      i0[d] = static_cast<int>(std::floor(std::min(u0, u1)));
      if (std::max(u0, u1) - i0[d] >= 2.0)
        throw std::invalid_argument("deposit_current_conserving: particle moved more than one cell");
      for (int a = 0; a < 3; ++a) {
        const double s0 = std::max(0.0, 1.0 - std::abs(u0 - (i0[d] + a)));
        const double s1 = std::max(0.0, 1.0 - std::abs(u1 - (i0[d] + a)));
        S0[d][a] = s0;
        dS[d][a] = s1 - s0;
      }
    }
    const double q = -kFourPi * w[k] / (h * h * dt);
    for (int d = 0; d < 3; ++d) {
      const int e = (d + 1) % 3, f = (d + 2) % 3;
      for (int b = 0; b < 3; ++b)
        for (int c = 0; c < 3; ++c) {
          const double tr = S0[e][b] * S0[f][c] + 0.5 * dS[e][b] * S0[f][c] +
                            0.5 * S0[e][b] * dS[f][c] + dS[e][b] * dS[f][c] / 3.0;
          double J = 0.0;
          for (int a = 0; a < 2; ++a) {
            J += q * dS[d][a] * tr;
            int idx[3];
            idx[d] = i0[d] + a;
            idx[e] = i0[e] + b;
            idx[f] = i0[f] + c;
            bufs[d][g.index(idx[0], idx[1], idx[2])] += J;
          }
        }
    }
  });
  for (int d = 0; d < 3; ++d) src.j[d] = std::move(out[d]);
}

Sources deposit(const ParticleEnsemble& ens, const Grid3& g, const Executor& ex) {
  Sources s(g);
  s.rho = deposit_charge(ens.x, ens.w, g, ex);
  deposit_current(ens.x, ens.p, ens.w, g, s, ex);
  return s;
}

Vec3 boris_push(const Vec3& p, const EMField& K, double dt) {
  const Vec3 um = p + 0.5 * dt * K.E;
  const double gm = std::sqrt(1.0 + um.squaredNorm());
  const Vec3 t = (0.5 * dt / gm) * K.B;
  const Vec3 s = (2.0 / (1.0 + t.squaredNorm())) * t;
  const Vec3 uprime = um + um.cross(t);
  const Vec3 up = um + uprime.cross(s);
  return up + 0.5 * dt * K.E;
}

void prepare_leapfrog(ParticleEnsemble& ens, const FieldState& fields, double dt,
                      const Executor& ex) {
  for_particle_blocks(ex, ens.size(), [&](std::size_t k) {
    ens.p[k] = boris_push(ens.p[k], fields.sample(ens.x[k]), -0.5 * dt);
  });
}

PicStepRecord pic_step(ParticleEnsemble& ens, FieldState& fields, double dt, const Executor& ex,
                       HistoryBuffer* history, std::vector<EMField>* gathered) {
  fields.grid().check_cfl(dt);
  ens.check_finite();
  const std::size_t n = ens.size();
  std::vector<EMField> K(n);
  std::vector<Vec3> p_new(n);
  for_particle_blocks(ex, n, [&](std::size_t k) {
    K[k] = fields.sample(ens.x[k]);
    p_new[k] = boris_push(ens.p[k], K[k], dt);
  });

  PicStepRecord rec;
  rec.t = fields.t;
  rec.field_energy = fields.energy(ex);
  rec.kinetic = kFourPi * ordered_sum(ex, n, [&](std::size_t k) {
                  return ens.w[k] * 0.5 * (p0(Momentum(ens.p[k])) + p0(Momentum(p_new[k])));
                });

  if (history) {
    ParticleSnapshot snap;
    snap.t = fields.t;
    snap.x.resize(n);
    snap.p.resize(n);
    snap.E.resize(n);
    snap.B.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      snap.x[k] = ens.x[k].cast<float>();
      snap.p[k] = (0.5 * (ens.p[k] + p_new[k])).cast<float>();
      snap.E[k] = K[k].E.cast<float>();
      snap.B[k] = K[k].B.cast<float>();
    }
    history->push(std::move(snap));
  }

  std::vector<Vec3> x_old = ens.x;
  for_particle_blocks(ex, n, [&](std::size_t k) {
    ens.x[k] += dt * vhat(Momentum(p_new[k]));
    ens.p[k] = p_new[k];
  });
  Sources src(fields.grid());
  deposit_current_conserving(x_old, ens.x, ens.w, fields.grid(), dt, src, ex);
  maxwell_step(fields, &src, dt, ex);
  if (gathered) *gathered = std::move(K);
  return rec;
}

}  // namespace rvm
