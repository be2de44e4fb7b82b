#include "rvm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "rvm/random.hpp"

namespace rvm::kernels {

ConeDirection::ConeDirection(const Vec3& w) : w_(w) {
  if (!(std::abs(w.norm() - 1.0) <= 1e-12))
    throw std::invalid_argument("ConeDirection: w must be a unit vector");
}

ConeDirection ConeDirection::from_points(const Vec3& x, const Vec3& y) {
  const Vec3 d = y - x;
  const double r = d.norm();
  if (!(r > 0.0)) throw std::invalid_argument("ConeDirection: coincident points");
  return ConeDirection(d / r);
}

ConeDirection ConeDirection::from_angles(double theta, double phi) {
  return ConeDirection(Vec3(std::sin(theta) * std::cos(phi), std::sin(theta) * std::sin(phi),
                            std::cos(theta))
                           .normalized());
}

namespace {

struct Local {
  double e;    // p0
  double e2;   // p0^2
  Vec3 v;      // vhat
  double s;    // 1 + vhat . w
  Vec3 wv;     // w - (vhat . w) vhat, cancellation-free
};

Local local(const Vec3& w, const Momentum& p) {
  Local L;
  L.e2 = 1.0 + p.vec().squaredNorm();
  L.e = std::sqrt(L.e2);
  L.v = p.vec() / L.e;
  L.s = one_plus_vhat_dot(p, w);
  L.wv = (w + L.v) - L.v * L.s;
  return L;
}

KernelT ht(const Vec3& w, const Momentum& p) {
  const Local L = local(w, p);
  const double f = 1.0 / (L.e2 * L.s * L.s);
  KernelT out;
  out.head<3>() = -(w + L.v) * f;
  out.tail<3>() = w.cross(L.v) * f;
  return out;
}

KernelS hs(const Vec3& w, const Momentum& p) {
  const Local L = local(w, p);
  const double a = 1.0 / (L.e * L.s);
  const double b = 1.0 / (L.e * L.s * L.s);
  KernelS out;
  out.topRows<3>() = -(Mat3::Identity() - L.v * L.v.transpose()) * a +
                     (w + L.v) * L.wv.transpose() * b;
  const Vec3 wxv = w.cross(L.v);
  out.bottomRows<3>() = (-skew(w) + wxv * L.v.transpose()) * a - wxv * L.wv.transpose() * b;
  return out;
}

}  // namespace

KernelT eval_HT(const ConeDirection& w, const Momentum& p) { return ht(w.vec(), p); }

KernelS eval_HS(const ConeDirection& w, const Momentum& p) { return hs(w.vec(), p); }

BCoeff eval_b(const ConeDirection& w, const Momentum& p) {
  const Local L = local(w.vec(), p);
  return Mat3::Identity() - w.vec() * L.v.transpose() / L.s;
}

Vec3 singularity_gradient(const ConeDirection& w, const Momentum& p) {
  const Local L = local(w.vec(), p);
  return -L.wv / (L.e * L.s * L.s);
}

SingularityBound singularity_bound(const ConeDirection& w, const Momentum& p) {
  const double s = one_plus_vhat_dot(p, w.vec());
  const double theta = std::atan2(p.vec().cross(w.vec()).norm(), -p.vec().dot(w.vec()));
  const double e2 = 1.0 + p.vec().squaredNorm();
  const double bound = theta > 0.0 ? std::min(1.0 / (theta * theta), e2) : e2;
  return {1.0 / s, bound, theta};
}

namespace {

using Flat = Eigen::Matrix<double, 24, 1>;
using FlatJac = Eigen::Matrix<double, 24, 3>;

Flat flat_kernels(const Vec3& w, const Momentum& p) {
  Flat out;
  out.head<6>() = ht(w, p);
  const KernelS S = hs(w, p);
  for (int j = 0; j < 3; ++j) out.segment<6>(6 + 6 * j) = S.col(j);
  return out;
}

FlatJac jac_p(const Vec3& w, const Momentum& p, double h) {
  FlatJac J;
  for (int k = 0; k < 3; ++k) {
    Vec3 pp = p.vec(), pm = p.vec();
    pp[k] += h;
    pm[k] -= h;
    J.col(k) = (flat_kernels(w, Momentum(pp)) - flat_kernels(w, Momentum(pm))) / (2.0 * h);
  }
  return J;
}

// y = w at unit distance from the vertex x = 0; w(y) = y / |y|.
FlatJac jac_y(const Vec3& w, const Momentum& p, double h) {
  FlatJac J;
  for (int k = 0; k < 3; ++k) {
    Vec3 yp = w, ym = w;
    yp[k] += h;
    ym[k] -= h;
    J.col(k) = (flat_kernels(yp.normalized(), p) - flat_kernels(ym.normalized(), p)) / (2.0 * h);
  }
  return J;
}

double rel_diff(const FlatJac& a, const FlatJac& b) {
  const double scale = std::max(b.cwiseAbs().maxCoeff(), 1e-300);
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

template <class JacFn>
FlatJac converge(JacFn&& jac, double h0, double floor, double& h_used, int& retries,
                 bool& flagged) {
  double h = h0;
  FlatJac prev = jac(h);
  for (int it = 0; it < 20; ++it) {
    const double hn = 0.5 * h;
    if (hn < floor) {
      flagged = true;
      h_used = h;
      return prev;
    }
    FlatJac next = jac(hn);
    if (rel_diff(prev, next) <= 1e-4) {
      h_used = hn;
      return next;
    }
    prev = next;
    h = hn;
    ++retries;
  }
  flagged = true;
  h_used = h;
  return prev;
}

// max over kernel components (rows) of the Euclidean norm over the
// differentiated index, for rows [r0, r0 + n)
double max_row_norm(const FlatJac& J, int r0, int n) {
  double m = 0.0;
  for (int r = r0; r < r0 + n; ++r) m = std::max(m, J.row(r).norm());
  return m;
}

double max_row_dot(const FlatJac& J, int r0, int n, const Vec3& v) {
  double m = 0.0;
  for (int r = r0; r < r0 + n; ++r) m = std::max(m, std::abs(J.row(r).dot(v)));
  return m;
}

}  // namespace

DerivativeRatios kernel_derivative_ratios(const ConeDirection& w, const Momentum& p, double h) {
  const Local L = local(w.vec(), p);
  DerivativeRatios r;
  const double pscale = std::max(1.0, p.norm());
  // The kernels vary on the angular scale sqrt(1 + vhat . w) about -vhat.
  const double ang = std::sqrt(std::min(1.0, L.s));
  const double hp0 = h * L.e * ang;
  const double hy0 = h * ang;
  const FlatJac Jp = converge([&](double hh) { return jac_p(w.vec(), p, hh); }, hp0,
                              1e-13 * pscale, r.step_p, r.retries, r.flagged);
  const FlatJac Jy = converge([&](double hh) { return jac_y(w.vec(), p, hh); }, hy0, 1e-13,
                              r.step_y, r.retries, r.flagged);
  r.grad_p_HT = max_row_norm(Jp, 0, 6) / L.e;
  r.grad_p_HS = max_row_norm(Jp, 6, 18) / L.e;
  const double gyT = max_row_norm(Jy, 0, 6), gyS = max_row_norm(Jy, 6, 18);
  r.grad_y_HT = gyT / L.e2;
  r.grad_y_HS = gyS / L.e2;
  r.grad_y_HT_over_p0 = gyT / L.e;
  r.grad_y_HS_over_p0 = gyS / L.e;
  r.vhat_grad_y_HT = max_row_dot(Jy, 0, 6, L.v) / L.e;
  r.vhat_grad_y_HS = max_row_dot(Jy, 6, 18, L.v) / L.e;
  return r;
}

Vec3 st_decomposition_residual(const SpaceTimeFunction& g, double s, const Vec3& y,
                               const ConeDirection& w, const Momentum& p, double h) {
  const Local L = local(w.vec(), p);
  const Mat3 b = Mat3::Identity() - w.vec() * L.v.transpose() / L.s;
  Vec3 lhs, T;
  double S;
  if (g.gradient) {
    const Eigen::Vector4d d = g.gradient(s, y);
    const Vec3 gy = d.tail<3>();
    lhs = gy;
    S = d[0] + L.v.dot(gy);
    for (int j = 0; j < 3; ++j) T[j] = -w[j] * d[0] + gy[j];
  } else {
    const double inv = 1.0 / (2.0 * h);
    for (int i = 0; i < 3; ++i) {
      Vec3 yp = y, ym = y;
      yp[i] += h;
      ym[i] -= h;
      lhs[i] = (g.value(s, yp) - g.value(s, ym)) * inv;
      T[i] = (g.value(s - h * w[i], yp) - g.value(s + h * w[i], ym)) * inv;
    }
    S = (g.value(s + h, y + h * L.v) - g.value(s - h, y - h * L.v)) * inv;
  }
  const Vec3 rhs = w.vec() * (S / L.s) + b * T;
  return lhs - rhs;
}

Mat3 direction_jacobian_fd(const Vec3& x, const Vec3& y, double h) {
  Mat3 J;
  for (int i = 0; i < 3; ++i) {
    Vec3 yp = y, ym = y;
    yp[i] += h;
    ym[i] -= h;
    const Vec3 d = ((yp - x).normalized() - (ym - x).normalized()) / (2.0 * h);
    J.row(i) = d.transpose();
  }
  return J;
}

KernelSample draw_kernel_sample(std::uint64_t seed, std::uint64_t i, double p_min, double p_max,
                                double theta_min) {
  SplitMix64 rng(seed, i);
  const double r = std::exp(rng.uniform(std::log(p_min), std::log(p_max)));
  const Vec3 dir = rng.unit_vector();
  KernelSample out;
  out.p = Momentum(r * dir);
  if (rng.uniform() < 0.5) {
    out.w = rng.unit_vector();
  } else {
    const double theta = std::exp(rng.uniform(std::log(theta_min), std::log(std::numbers::pi)));
    out.w = rotate_away(-dir, theta, rng.uniform(0.0, 2.0 * std::numbers::pi));
  }
  return out;
}

double ratio_HT(const KernelSample& s) {
  const double u = one_plus_vhat_dot(s.p, s.w);
  const double e2 = 1.0 + s.p.vec().squaredNorm();
  return ht(s.w, s.p).norm() * e2 * u * std::sqrt(u);
}

double ratio_HS(const KernelSample& s) {
  const double u = one_plus_vhat_dot(s.p, s.w);
  return hs(s.w, s.p).norm() * std::sqrt(1.0 + s.p.vec().squaredNorm()) * u;
}

double ratio_b(const KernelSample& s) {
  const double u = one_plus_vhat_dot(s.p, s.w);
  const double e2 = 1.0 + s.p.vec().squaredNorm();
  const Vec3 v = s.p.vec() / std::sqrt(e2);
  return (Mat3::Identity() - s.w * v.transpose() / u).norm() / e2;
}

namespace {

void take(BoundMax& m, double value, const KernelSample& s) {
  if (value > m.value) {
    m.value = value;
    m.argmax = s;
  }
}

}  // namespace

KernelBoundSurvey survey_kernel_bounds(std::uint64_t n, std::uint64_t seed, const Executor& ex,
                                       double p_min, double p_max, double theta_min) {
  const std::uint64_t block = kReductionBlock;
  const std::uint64_t n_blocks = (n + block - 1) / block;
  std::vector<KernelBoundSurvey> partial(n_blocks);
  ex.for_each_task(n_blocks, [&](std::size_t bi) {
    KernelBoundSurvey& acc = partial[bi];
    const std::uint64_t lo = bi * block, hi = std::min(n, lo + block);
    for (std::uint64_t i = lo; i < hi; ++i) {
      const KernelSample s = draw_kernel_sample(seed, i, p_min, p_max, theta_min);
      take(acc.HT, ratio_HT(s), s);
      take(acc.HS, ratio_HS(s), s);
      take(acc.b, ratio_b(s), s);
      take(acc.sing, singularity_bound(ConeDirection(s.w), s.p).ratio(), s);
    }
  });
  KernelBoundSurvey out;
  out.samples = n;
  for (const auto& pb : partial) {
    take(out.HT, pb.HT.value, pb.HT.argmax);
    take(out.HS, pb.HS.value, pb.HS.argmax);
    take(out.b, pb.b.value, pb.b.argmax);
    take(out.sing, pb.sing.value, pb.sing.argmax);
  }
  return out;
}

}  // namespace rvm::kernels
