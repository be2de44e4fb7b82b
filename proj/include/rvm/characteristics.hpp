#pragma once

// Characteristic curves (X(s), V(s)) of the Vlasov equation, their
// first-variation Jacobians, and integrals of the field along them.

#include <functional>
#include <limits>
#include <string>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rvm/parallel.hpp"
#include "rvm/relkin.hpp"

namespace rvm::characteristics {

using Mat6 = Eigen::Matrix<double, 6, 6>;

struct CharState {
  double s = 0.0;
  Vec3 X = Vec3::Zero();
  Vec3 V = Vec3::Zero();
};

/// A = d(X, V) / d(x, p) along one characteristic.
struct JacobianState {
  Mat6 A = Mat6::Identity();
};

/// Spatial field derivatives: dE(i, k) = dE_i / dx_k, same for dB.
struct FieldGradient {
  Mat3 dE = Mat3::Zero();
  Mat3 dB = Mat3::Zero();
};

/// Raised when a trajectory leaves the region where a sampler is defined.
class DomainError : public std::runtime_error {
 public:
  DomainError(const std::string& what, double exit_time)
      : std::runtime_error(what), exit_time_(exit_time) {}
  double exit_time() const { return exit_time_; }

 private:
  double exit_time_;
};

/// Evaluator (t, x) -> (E, B). Implementations must be safe for concurrent
/// reads.
class FieldSampler {
 public:
  virtual ~FieldSampler() = default;

  virtual EMField sample(double t, const Vec3& x) const = 0;

  /// Default: second-order central differences of sample() with step
  /// gradient_step().
  virtual FieldGradient gradient(double t, const Vec3& x) const;

  virtual bool contains(double /*t*/, const Vec3& /*x*/) const { return true; }

  virtual double gradient_step() const { return 1e-5; }
};

class ZeroField final : public FieldSampler {
 public:
  EMField sample(double, const Vec3&) const override { return {}; }
  FieldGradient gradient(double, const Vec3&) const override { return {}; }
};

class UniformField final : public FieldSampler {
 public:
  UniformField(const Vec3& E, const Vec3& B) : field_{E, B} {}
  EMField sample(double, const Vec3&) const override { return field_; }
  FieldGradient gradient(double, const Vec3&) const override { return {}; }

 private:
  EMField field_;
};

/// Field given by closures, optionally with an analytic gradient and a
/// bounded time window / spatial box.
class AnalyticField final : public FieldSampler {
 public:
  using FieldFn = std::function<EMField(double, const Vec3&)>;
  using GradientFn = std::function<FieldGradient(double, const Vec3&)>;

  explicit AnalyticField(FieldFn field, GradientFn gradient = {})
      : field_(std::move(field)), gradient_(std::move(gradient)) {}

  AnalyticField& with_time_window(double t0, double t1) {
    t0_ = t0;
    t1_ = t1;
    return *this;
  }
  AnalyticField& with_box(const Vec3& lo, const Vec3& hi) {
    box_ = {lo, hi};
    return *this;
  }

  EMField sample(double t, const Vec3& x) const override { return field_(t, x); }
  FieldGradient gradient(double t, const Vec3& x) const override;
  bool contains(double t, const Vec3& x) const override;

 private:
  FieldFn field_;
  GradientFn gradient_;
  double t0_ = -std::numeric_limits<double>::infinity();
  double t1_ = std::numeric_limits<double>::infinity();
  std::optional<std::pair<Vec3, Vec3>> box_;
};

/// One classical RK4 step of dX/ds = vhat(V), dV/ds = E + vhat x B. dt may be
/// negative (backward characteristics). Throws DomainError if any stage
/// leaves the sampler's domain.
CharState advance(const CharState& state, const FieldSampler& fields, double dt);

struct CharJacobian {
  CharState state;
  JacobianState jacobian;
};

/// RK4 step of the characteristic together with the variational equation
/// dA/ds = M(s) A, M = [[0, dvhat/dV], [dF/dX, dF/dV]].
CharJacobian advance_jacobian(const CharState& state, const JacobianState& jac,
                              const FieldSampler& fields, double dt);

/// Generator matrix M of the variational equation at one phase point.
Mat6 variational_generator(const Vec3& V, const EMField& K, const FieldGradient& dK);

/// Integrates from state.s to state.s + duration in steps of at most |dt|.
CharState integrate(const CharState& state, const FieldSampler& fields, double duration,
                    double dt);
CharJacobian integrate_jacobian(const CharState& state, const FieldSampler& fields,
                                double duration, double dt);

/// Integral of |E| + |B| along the characteristic issued from start over
/// [start.s, start.s + T], carried as an extra RK4 component so it has the
/// same order as advance(). Throws DomainError (with exit time) on domain
/// exit.
double field_integral_along(const CharState& start, const FieldSampler& fields, double T,
                            double dt);

/// Cumulative version: value after every step (first entry is 0 at start.s).
struct FieldIntegralSeries {
  std::vector<double> s;
  std::vector<double> cumulative;
  CharState final_state;
};
FieldIntegralSeries field_integral_series(const CharState& start, const FieldSampler& fields,
                                          double T, double dt);

/// Sampled trajectory t -> X(t), linearly interpolated between samples.
class Trajectory {
 public:
  Trajectory(std::vector<double> t, std::vector<Vec3> x);
  static Trajectory from_function(const std::function<Vec3(double)>& X, double t0, double t1,
                                  int samples);

  Vec3 at(double t) const;
  double t_begin() const { return t_.front(); }
  double t_end() const { return t_.back(); }
  /// max |X'| over the sampled segments.
  double max_speed() const;

 private:
  std::vector<double> t_;
  std::vector<Vec3> x_;
};

struct ConeIntegrals {
  double I0 = 0.0;
  double I1 = 0.0;
};

struct PallardQuadrature {
  int n_outer = 16;  ///< Gauss nodes in s'
  int n_inner = 16;  ///< Gauss nodes in s per s'
  int n_theta = 12;  ///< Gauss nodes in cos(theta)
  int n_phi = 16;    ///< uniform nodes in phi
};

/// I_i(t; g) = int_0^t ds' int_{C_{s', X(s')}} dsigma g(s, X(s') + (s'-s) w) / (s'-s)^{i+1}
/// for i = 0, 1, by tensor-product quadrature over (s', s, theta, phi).
/// Rejects trajectories with max sampled speed >= 1.
ConeIntegrals pallard_cone_integrals(const Trajectory& traj,
                                     const std::function<double(double, const Vec3&)>& g,
                                     double t, const PallardQuadrature& quad = {});

/// 1 + sup over the tracked bundle of |grad X| + |grad V| (Frobenius norms of
/// the 3x6 blocks), forward from A and backward from A^{-1}. Running maxima:
/// both are non-decreasing as observations accumulate.
class CharSupTracker {
 public:
  void observe(const Mat6& A);
  void observe_bundle(const std::vector<Mat6>& As);

  double forward() const { return forward_; }
  double backward() const { return backward_; }
  /// Largest |det A - 1| seen.
  double det_deviation() const { return det_dev_; }
  /// Largest ratio |A^{-1}_ij| / (cofactor bound built from A) seen; <= 1.
  double cramer_ratio() const { return cramer_ratio_; }
  std::size_t observations() const { return count_; }

 private:
  double forward_ = 1.0;
  double backward_ = 1.0;
  double det_dev_ = 0.0;
  double cramer_ratio_ = 0.0;
  std::size_t count_ = 0;
};

double forward_derivative_size(const Mat6& A);

/// Hadamard bound on every 5x5 minor of A: for entry (i, j) of adj(A) the
/// product of the norms of the rows of A other than j, with column i removed.
/// With det A = 1 this bounds |A^{-1}_ij|, a degree-5 polynomial in the
/// entries of A.
Mat6 cofactor_bound(const Mat6& A);

/// Integrates a bundle of independent characteristics with their Jacobians.
/// Results are stored in bundle order, independent of worker count.
std::vector<CharJacobian> integrate_bundle(const std::vector<CharState>& seeds,
                                           const FieldSampler& fields, double duration,
                                           double dt, const Executor& ex);

}  // namespace rvm::characteristics
