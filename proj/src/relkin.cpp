#include "rvm/relkin.hpp"

#include <cmath>
#include <stdexcept>

namespace rvm {

double p0(const Momentum& p) { return std::sqrt(1.0 + p.vec().squaredNorm()); }

Vec3 vhat(const Momentum& p) { return p.vec() / p0(p); }

double w3(const Momentum& p) {
  const double e = p0(p);
  return e * std::sqrt(e) * std::log1p(e);
}

Vec3 lorentz_force(const EMField& K, const Momentum& p) {
  return K.E + vhat(p).cross(K.B);
}

Mat3 dvhat_dp(const Momentum& p) {
  const double e = p0(p);
  const Vec3 v = p.vec() / e;
  return (Mat3::Identity() - v * v.transpose()) / e;
}

double lorentz_defect(const Momentum& p) {
  const long double px = p[0], py = p[1], pz = p[2];
  const long double e = std::sqrt(1.0L + px * px + py * py + pz * pz);
  const long double vx = px / e, vy = py / e, vz = pz / e;
  return static_cast<double>(1.0L - (vx * vx + vy * vy + vz * vz));
}

double one_plus_vhat_dot(const Momentum& p, const Vec3& omega) {
  const double e = p0(p);
  const double pw = p.vec().dot(omega);
  if (pw >= 0.0) return (e + pw) / e;
  // p0^2 - (p.w)^2 = 1 + |p x w|^2 + |p|^2 (1 - |w|^2)
  const double num = 1.0 + p.vec().cross(omega).squaredNorm() +
                     p.vec().squaredNorm() * (1.0 - omega.squaredNorm());
  return num / ((e - pw) * e);
}

ElementaryIdentities elementary_identities(const Momentum& p, const Vec3& omega) {
  if (!(std::abs(omega.norm() - 1.0) <= 1e-12))
    throw std::invalid_argument("elementary_identities: omega is not a unit vector");

  const long double px = p[0], py = p[1], pz = p[2];
  const long double e2 = 1.0L + px * px + py * py + pz * pz;
  const long double e = std::sqrt(e2);
  const long double vx = px / e, vy = py / e, vz = pz / e;
  const long double defect = (1.0L - (vx * vx + vy * vy + vz * vz)) - 1.0L / e2;

  const Vec3 v = vhat(p);
  const double s = one_plus_vhat_dot(p, omega);
  const double sum_excess = (omega + v).squaredNorm() - 2.0 * s;
  const double cross_slack = 2.0 * s - v.cross(omega).squaredNorm();
  return {static_cast<double>(defect), sum_excess, cross_slack};
}

Mat3 skew(const Vec3& a) {
  Mat3 m;
  m << 0.0, -a.z(), a.y(),
       a.z(), 0.0, -a.x(),
       -a.y(), a.x(), 0.0;
  return m;
}

bool is_finite(const Vec3& v) {
  return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

}  // namespace rvm
