#pragma once

// Mixed norms ||p0^theta f||_{L^q_x L^1_p} of a particle ensemble, moments,
// energy, and the interpolation / moment inequalities evaluated on them.

#include <limits>
#include <string>
#include <vector>

#include "rvm/grid.hpp"
#include "rvm/particles.hpp"

namespace rvm::diagnostics {

/// Spatial exponent in [1, inf]; infinity is its own state, not a large
/// number.
class Exponent {
 public:
  /// Throws std::invalid_argument for q < 1 or NaN.
  explicit Exponent(double q);
  static Exponent infinity() { return Exponent(); }

  bool is_infinite() const { return infinite_; }
  double value() const { return infinite_ ? std::numeric_limits<double>::infinity() : q_; }
  std::string str() const;

 private:
  Exponent() : q_(0.0), infinite_(true) {}
  double q_;
  bool infinite_;
};

/// Cubic binning grid with m cells per axis over [lo, lo + L)^3, periodic.
struct BinningGrid {
  double lo = -0.5;
  double L = 1.0;
  int m = 8;

  double h() const { return L / m; }
  std::string id() const;
  static BinningGrid around(const Grid3& g, int m) { return {g.lo(), g.L(), m}; }
};

struct NormSpec {
  double theta = 0.0;
  Exponent q{1.0};
  BinningGrid grid;
};

/// Cell densities sum_{k in cell} w_k p0^theta(p_k) / h^3, in a fixed
/// summation order.
std::vector<double> cell_densities(const ParticleEnsemble& ens, double theta,
                                   const BinningGrid& grid, const Executor& ex = Executor{});
/// Same binning for arbitrary per-particle values: sum_{k in cell} value_k / h^3.
std::vector<double> cell_densities(const std::vector<Vec3>& x, const std::vector<double>& values,
                                   const BinningGrid& grid, const Executor& ex = Executor{});

/// Discrete L^q norm of cell densities (max for q = inf). For q = 1 the
/// binning cancels and the value is the particle sum, identical to
/// moment(ens, theta). Any positive finite exponent is accepted by the
/// lower-level lq_norm.
double weighted_norm(const ParticleEnsemble& ens, const NormSpec& spec,
                     const Executor& ex = Executor{});
double lq_norm(const std::vector<double>& density, double q, double cell_volume);

/// sum_k w_k p0^N(p_k). Throws std::overflow_error when not finite.
double moment(const ParticleEnsemble& ens, double N, const Executor& ex = Executor{});

/// Field energy plus 4 pi sum_k w_k p0(p_k).
double total_energy(const FieldState& fields, const ParticleEnsemble& ens,
                    const Executor& ex = Executor{});

struct InequalityValue {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio() const { return lhs / rhs; }
};

/// ||p0^S f||_{L^q L^1} against ||p0^M f||^{(S+3)/(M+3)}_{L^{(S+3)q/(M+3)} L^1}.
/// Requires M >= S > -3 and q >= 1.
InequalityValue check_interpolation(const ParticleEnsemble& ens, double S, double M, double q,
                                    const BinningGrid& grid, const Executor& ex = Executor{});

/// The special case q = (M + 3) / (S + 3).
InequalityValue check_interpolation_special(const ParticleEnsemble& ens, double S, double M,
                                            const BinningGrid& grid,
                                            const Executor& ex = Executor{});

struct Prop81Spec {
  double eta;
  double rho;
  double sigma;
  double q;
  double N;
};

/// Throws std::invalid_argument naming the violated precondition
/// (0 < q eta < 1, sigma >= (rho - eta (N + 3 - 3q)) / (1 - q eta)).
void validate_prop81(const Prop81Spec& s);

/// ||f p0^rho||_{L^q L^1} against M_{sigma,q}^{1 - q eta} ||f p0^N||^eta_{L^1 L^1}.
InequalityValue check_prop81(const ParticleEnsemble& ens, const Prop81Spec& spec,
                             const BinningGrid& grid, const Executor& ex = Executor{});

/// Discrete L^r_x norms of |E| and |B| with components averaged to nodes.
struct FieldNorms {
  double E = 0.0;
  double B = 0.0;
};
FieldNorms field_lr_norms(const FieldState& f, double r);

/// One monitored time level for the moment estimate.
struct MomentSample {
  double t;
  double moment;  ///< ||p0^N f||_{L^1 L^1}
  double E_norm;  ///< ||E||_{L^{N+3}_x}
  double B_norm;
};

struct MomentEstimatePoint {
  double t;
  double lhs;  ///< running max of the moment
  double rhs;  ///< initial moment + (int ||E||)^{N+3} + (int ||B||)^{N+3}
};

/// Time integrals by the trapezoid rule over the given samples.
std::vector<MomentEstimatePoint> check_moment_estimate(const std::vector<MomentSample>& run,
                                                       double N);

}  // namespace rvm::diagnostics
