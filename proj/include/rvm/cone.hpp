#pragma once

// Backward light-cone integrals: the Glassey-Strauss field evaluator over a
// particle history, and the explicit solution of the inhomogeneous wave
// equation.
//
// Cone measure: int_{C_{t,x}} g dsigma
//   = int_0^t ds int_{S^2} dOmega (t - s)^2 g(s, x + (t - s) w).

#include <functional>
#include <optional>
#include <vector>

#include "rvm/history.hpp"
#include "rvm/parallel.hpp"
#include "rvm/relkin.hpp"

namespace rvm {

struct ConeQuadratureSpec {
  int n_s = 32;      ///< uniform intervals in s (composite Simpson)
  int n_theta = 4;   ///< Gauss-Legendre nodes in cos(theta)
  int n_phi = 8;     ///< uniform nodes in phi
  double delta_vertex = 0.5;  ///< dropped s-range near the vertex, in history strides

  /// Throws std::invalid_argument unless all counts are >= 2 and
  /// delta_vertex is in (0, 1].
  void validate() const;
  ConeQuadratureSpec halved() const;
  ConeQuadratureSpec doubled() const;
};

/// Normalized biweight window 105 / (32 pi R^3) (1 - r^2 / R^2)^2 on r < R.
double biweight(double r, double R);

struct GsOptions {
  double window_radius = 0.1;  ///< smoothing radius of the particle sum
  bool estimate_error = true;  ///< also evaluate at spec.halved()
  /// Initial-data contribution (E)_0, (B)_0 when it does not vanish.
  std::optional<EMField> data_term;
};

struct GsResult {
  EMField K;    ///< K_T + K_S + data term
  EMField K_T;
  EMField K_S;
  double error_estimate = 0.0;  ///< |K(spec) - K(spec/2)| (E and B norms summed)
  double dropped_vertex = 0.0;  ///< |integrand| at the last node times the dropped length
  /// int int f / (p0^2 (1 + vhat . w)^{3/2} (t - s)^2) dp dsigma, the scalar
  /// bound integral for |K_T|.
  double kt_bound_integral = 0.0;
};

/// Field at (t, x) from the cone integrals over the stored history.
///
/// Angular rule: for each particle whose smoothing ball meets the sphere
/// |y - x| = t - s, Gauss-Legendre in cos(theta) and uniform phi are laid out
/// about the direction from x to the particle, with theta restricted to the
/// cap where the window is nonzero (the integrand vanishes elsewhere).
///
/// Requires history covering [0, t - delta_vertex * stride]. Without a
/// data term the stored run must have consistent initial data and every
/// initial particle window must lie strictly inside |y - x| < t, in which
/// case the initial-data term is zero; otherwise std::domain_error.
GsResult gs_evaluate(double t, const Vec3& x, const HistoryBuffer& history,
                     const ConeQuadratureSpec& spec, const GsOptions& opt);

std::vector<GsResult> gs_evaluate_many(double t, const std::vector<Vec3>& xs,
                                       const HistoryBuffer& history,
                                       const ConeQuadratureSpec& spec, const GsOptions& opt,
                                       const Executor& ex = Executor{});

using SpaceTimeScalar = std::function<double(double, const Vec3&)>;

/// u(t, x) = int_{C_{t,x}} F(s, y) / (t - s) dsigma: composite Simpson in s
/// on n_s intervals of [0, t], Gauss-Legendre in cos(theta), uniform phi.
double wave_cone_integral(const SpaceTimeScalar& F, double t, const Vec3& x,
                          const ConeQuadratureSpec& spec);

}  // namespace rvm
