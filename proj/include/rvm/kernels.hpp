#pragma once

// Glassey-Strauss light-cone kernels H_T, H_S, the coefficients b_ij, and
// numerical checks of their bounds and of the S/T splitting of d/dy.
//
// Convention: a point of the backward cone of (t, x) is (s, x + (t - s) w),
// so w = (y - x) / |y - x|. With this choice d w_j / d y_i =
// (delta_ij - w_i w_j) / |y - x| and a static positive charge produces an
// outward E_T.

#include <cstdint>
#include <functional>
#include <optional>

#include "rvm/parallel.hpp"
#include "rvm/relkin.hpp"

namespace rvm::kernels {

class ConeDirection {
 public:
  /// Throws std::invalid_argument unless ||w| - 1| <= 1e-12.
  explicit ConeDirection(const Vec3& w);

  static ConeDirection from_points(const Vec3& x, const Vec3& y);
  static ConeDirection from_angles(double theta, double phi);

  const Vec3& vec() const { return w_; }
  double operator[](int i) const { return w_[i]; }
  ConeDirection operator-() const { return ConeDirection(-w_); }

 private:
  Vec3 w_;
};

using KernelT = Eigen::Matrix<double, 6, 1>;
using KernelS = Eigen::Matrix<double, 6, 3>;
using BCoeff = Mat3;

KernelT eval_HT(const ConeDirection& w, const Momentum& p);
KernelS eval_HS(const ConeDirection& w, const Momentum& p);
BCoeff eval_b(const ConeDirection& w, const Momentum& p);

/// Closed-form d/dp_i of 1 / (1 + vhat . w):
/// -(w_i - vhat_i (vhat . w)) / (p0 (1 + vhat . w)^2).
Vec3 singularity_gradient(const ConeDirection& w, const Momentum& p);

struct SingularityBound {
  double value;  ///< 1 / (1 + vhat . w)
  double bound;  ///< min(theta^-2, p0^2)
  double theta;  ///< angle between vhat and -w
  double ratio() const { return value / bound; }
};
SingularityBound singularity_bound(const ConeDirection& w, const Momentum& p);

/// Finite-difference kernel derivatives divided by their bound expressions
/// with |y - x| = 1. Euclidean norms over the differentiated index, maxima
/// over kernel components.
struct DerivativeRatios {
  double grad_p_HT = 0.0;          ///< |grad_p H_T| / p0
  double grad_y_HT = 0.0;          ///< |grad_y H_T| / p0^2
  double vhat_grad_y_HT = 0.0;     ///< |vhat . grad_y H_T| / p0
  double grad_y_HT_over_p0 = 0.0;  ///< |grad_y H_T| / p0: unprojected witness
  double grad_p_HS = 0.0;
  double grad_y_HS = 0.0;
  double vhat_grad_y_HS = 0.0;
  double grad_y_HS_over_p0 = 0.0;
  double step_p = 0.0;
  double step_y = 0.0;
  int retries = 0;
  bool flagged = false;  ///< steps could not be made to agree
};

/// h is the base relative step; it is scaled by the local width of the
/// singularity and halved until two successive estimates agree to 1e-4.
DerivativeRatios kernel_derivative_ratios(const ConeDirection& w, const Momentum& p,
                                          double h = 1e-4);

/// Space-time test function g(s, y), optionally with analytic gradient
/// (d_s g, d_y1 g, d_y2 g, d_y3 g).
struct SpaceTimeFunction {
  std::function<double(double, const Vec3&)> value;
  std::function<Eigen::Vector4d(double, const Vec3&)> gradient;
};

/// d_{y_i} g - [w_i / (1 + vhat . w) S g + b_ij T_j g] with S = d_s + vhat . grad_y
/// and T_j = -w_j d_s + d_{y_j}. With an analytic gradient every term is
/// formed from it; otherwise each of d_{y_i}, S and T_j is an independent
/// central difference along its own space-time direction with step h.
Vec3 st_decomposition_residual(const SpaceTimeFunction& g, double s, const Vec3& y,
                               const ConeDirection& w, const Momentum& p, double h = 1e-5);

/// d w_j / d y_i at y for fixed vertex x, by central differences.
Mat3 direction_jacobian_fd(const Vec3& x, const Vec3& y, double h = 1e-6);

// ---------------------------------------------------------------------------
// Sampling oracles for the bound constants.

struct KernelSample {
  Momentum p;
  Vec3 w = Vec3::UnitZ();
};

/// Deterministic sample i of a stream: |p| log-uniform in [p_min, p_max] with
/// random direction; half of the directions w are uniform on the sphere and
/// half are at angle theta from -p/|p| with theta log-uniform in
/// [theta_min, pi].
KernelSample draw_kernel_sample(std::uint64_t seed, std::uint64_t i, double p_min = 1e-3,
                                double p_max = 1e3, double theta_min = 1e-6);

struct BoundMax {
  double value = 0.0;
  KernelSample argmax;
};

struct KernelBoundSurvey {
  std::uint64_t samples = 0;
  BoundMax HT;   ///< |H_T| p0^2 (1 + vhat . w)^{3/2}
  BoundMax HS;   ///< |H_S|_F p0 (1 + vhat . w)
  BoundMax b;    ///< |b|_F / p0^2
  BoundMax sing; ///< singularity value / min(theta^-2, p0^2)
};

double ratio_HT(const KernelSample& s);
double ratio_HS(const KernelSample& s);
double ratio_b(const KernelSample& s);

/// Maxima over samples [0, n) of the stream; reproducible across worker
/// counts (fixed blocks, ordered merge, first index wins ties).
KernelBoundSurvey survey_kernel_bounds(std::uint64_t n, std::uint64_t seed, const Executor& ex,
                                       double p_min = 1e-3, double p_max = 1e3,
                                       double theta_min = 1e-6);

}  // namespace rvm::kernels
