#pragma once

// Weighted particle representation of f, cloud-in-cell deposition, and the
// leapfrog particle-in-cell coupling to the Yee solver.

#include <cstdint>
#include <optional>
#include <vector>

#include "rvm/grid.hpp"
#include "rvm/history.hpp"

namespace rvm {

/// Particle k carries phase-space measure w[k] > 0 at (x[k], p[k]).
/// Positions are never wrapped; periodicity is applied at deposition and
/// gather time.
struct ParticleEnsemble {
  std::vector<Vec3> x;
  std::vector<Vec3> p;
  std::vector<double> w;

  std::size_t size() const { return w.size(); }
  void add(const Vec3& xk, const Vec3& pk, double wk) {
    x.push_back(xk);
    p.push_back(pk);
    w.push_back(wk);
  }
  double total_weight(const Executor& ex = Executor{}) const;
  /// Throws std::invalid_argument naming the first non-finite particle.
  void check_finite() const;
};

/// Initial-data family: anisotropic Gaussian (or multivariate Student-t when
/// tail_exponent > 0, giving a |p|^-(tail_exponent + 3) tail) in p, uniform
/// in the box or Gaussian in x. Equal weights total_weight / count.
struct EnsembleSpec {
  std::size_t count = 1000;
  double total_weight = 1.0;
  enum class Space { Uniform, Gaussian } space = Space::Gaussian;
  Vec3 center = Vec3::Zero();
  double x_sigma = 0.1;
  double x_cutoff = 0.0;  ///< Gaussian truncation radius; 0 disables
  double box_L = 1.0;     ///< Uniform: [-L/2, L/2)^3 around center
  Vec3 p_sigma = Vec3::Constant(0.1);
  Vec3 p_drift = Vec3::Zero();
  double tail_exponent = 0.0;
  double p_cutoff = 0.0;  ///< reject |p - drift| above this; 0 disables
};

ParticleEnsemble sample_ensemble(const EnsembleSpec& spec, std::uint64_t seed);

/// Number of private accumulation lanes; fixed so deposition sums are
/// bitwise identical for any worker count.
inline constexpr int kDepositLanes = 8;

/// rho = 4 pi sum w_k S(x - x_k) / h^3 at nodes (S = CIC weight).
std::vector<double> deposit_charge(const std::vector<Vec3>& x, const std::vector<double>& w,
                                   const Grid3& g, const Executor& ex = Executor{});

/// j = 4 pi sum w_k vhat(p_k) S(x - x_k) / h^3 at the E locations.
void deposit_current(const std::vector<Vec3>& x, const std::vector<Vec3>& p,
                     const std::vector<double>& w, const Grid3& g, Sources& out,
                     const Executor& ex = Executor{});

/// Charge-conserving current for straight moves x_old -> x_new over dt
/// (Esirkepov's decomposition for the CIC shape): with rho from
/// deposit_charge, (rho(x_new) - rho(x_old)) / dt + div_h j = 0 to round-off.
/// Moves must stay below one cell per axis.
void deposit_current_conserving(const std::vector<Vec3>& x_old, const std::vector<Vec3>& x_new,
                                const std::vector<double>& w, const Grid3& g, double dt,
                                Sources& out, const Executor& ex = Executor{});

/// Charge and current of the ensemble at its current positions.
Sources deposit(const ParticleEnsemble& ens, const Grid3& g, const Executor& ex = Executor{});

/// Relativistic Boris rotation: p advanced by dt under constant K. With
/// E = 0 the update is a pure rotation of p.
Vec3 boris_push(const Vec3& p, const EMField& K, double dt);

struct PicStepRecord {
  double t = 0.0;             ///< integer time level n the record refers to
  double field_energy = 0.0;  ///< at t
  double kinetic = 0.0;       ///< 4 pi sum w (p0(p^{n-1/2}) + p0(p^{n+1/2})) / 2
};

/// Leapfrog state: ens.p holds p^{n-1/2}, ens.x holds x^n, fields at t^n.
/// One step: gather at x^n, Boris push, move to x^{n+1} with
/// vhat(p^{n+1/2}), deposit the charge-conserving j of that move,
/// maxwell_step. If history is given a
/// snapshot at t^n (with p^n = mean of the half-step momenta) is pushed.
PicStepRecord pic_step(ParticleEnsemble& ens, FieldState& fields, double dt,
                       const Executor& ex = Executor{}, HistoryBuffer* history = nullptr,
                       std::vector<EMField>* gathered = nullptr);

/// Moves ens.p from t^0 to t^{-1/2} with the fields at t^0.
void prepare_leapfrog(ParticleEnsemble& ens, const FieldState& fields, double dt,
                      const Executor& ex = Executor{});

}  // namespace rvm
