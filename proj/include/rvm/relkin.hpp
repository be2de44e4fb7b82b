#pragma once

// Phase-space primitives for the relativistic Vlasov-Maxwell system in
// dimensionless units (c = 1, unit mass and charge).

#include <Eigen/Dense>

namespace rvm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Particle momentum p (dimensionless). Kept distinct from positions and
/// field vectors so the two cannot be swapped at a call site.
class Momentum {
 public:
  Momentum() = default;
  explicit Momentum(const Vec3& p) : p_(p) {}
  Momentum(double px, double py, double pz) : p_(px, py, pz) {}

  const Vec3& vec() const { return p_; }
  double operator[](int i) const { return p_[i]; }
  double norm() const { return p_.norm(); }

  Momentum operator-() const { return Momentum(-p_); }

 private:
  Vec3 p_ = Vec3::Zero();
};

struct PhasePoint {
  Vec3 x = Vec3::Zero();
  Momentum p;
};

/// Electric and magnetic field values at one space-time point.
struct EMField {
  Vec3 E = Vec3::Zero();
  Vec3 B = Vec3::Zero();

  /// |E| + |B|, the integrand of the field-along-characteristic criterion.
  double magnitude_sum() const { return E.norm() + B.norm(); }

  EMField& operator+=(const EMField& o) {
    E += o.E;
    B += o.B;
    return *this;
  }
  friend EMField operator+(EMField a, const EMField& b) { return a += b; }
  friend EMField operator*(double s, const EMField& f) { return {s * f.E, s * f.B}; }
};

/// p0 = sqrt(1 + |p|^2), the particle energy.
double p0(const Momentum& p);

/// Relativistic velocity p / p0; always strictly sub-luminal.
Vec3 vhat(const Momentum& p);

/// Momentum weight p0^{3/2} log(1 + p0).
double w3(const Momentum& p);

/// Lorentz force E + vhat(p) x B.
Vec3 lorentz_force(const EMField& K, const Momentum& p);

/// Jacobian d vhat_i / d p_j = (delta_ij - vhat_i vhat_j) / p0.
Mat3 dvhat_dp(const Momentum& p);

/// 1 - |vhat|^2, formed from an extended-precision velocity so that the
/// subtraction keeps ~1e-13 relative accuracy up to |p| ~ 1e3.
double lorentz_defect(const Momentum& p);

/// 1 + vhat . omega without cancellation in the antipodal regime. For
/// p . omega < 0 the rationalized form (1 + |p x omega|^2) / (p0 - p . omega)
/// is used, scaled by 1/p0.
double one_plus_vhat_dot(const Momentum& p, const Vec3& omega);

struct ElementaryIdentities {
  /// (1 - |vhat|^2) - 1/p0^2; identically zero.
  double defect;
  /// |omega + vhat|^2 - 2 (1 + vhat . omega) = |vhat|^2 - 1 <= 0.
  double sum_excess;
  /// 2 (1 + vhat . omega) - |vhat x omega|^2 >= 0.
  double cross_slack;
};

/// Evaluates the three elementary relations used by the kernel bounds.
/// Throws std::invalid_argument unless | |omega| - 1 | <= 1e-12.
ElementaryIdentities elementary_identities(const Momentum& p, const Vec3& omega);

/// Cross-product matrix: skew(a) * b == a.cross(b).
Mat3 skew(const Vec3& a);

bool is_finite(const Vec3& v);

}  // namespace rvm
