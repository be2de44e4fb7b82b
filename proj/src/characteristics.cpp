#include "rvm/characteristics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "rvm/quadrature.hpp"

namespace rvm::characteristics {

namespace {

struct Deriv {
  Vec3 dX;
  Vec3 dV;
  double dI = 0.0;
};

void require_inside(const FieldSampler& fields, double s, const Vec3& X) {
  if (!fields.contains(s, X)) {
    std::ostringstream msg;
    msg << "characteristic left the field domain at s = " << s << ", X = (" << X.x() << ", "
        << X.y() << ", " << X.z() << ")";
    throw DomainError(msg.str(), s);
  }
}

Deriv rhs(const FieldSampler& fields, double s, const Vec3& X, const Vec3& V) {
  require_inside(fields, s, X);
  const EMField K = fields.sample(s, X);
  const Momentum p(V);
  return {vhat(p), lorentz_force(K, p), K.magnitude_sum()};
}

int step_count(double duration, double dt) {
  if (!(std::abs(dt) > 0.0)) throw std::invalid_argument("characteristics: dt must be nonzero");
  return std::max(1, static_cast<int>(std::ceil(std::abs(duration) / std::abs(dt) - 1e-9)));
}

}  // namespace

FieldGradient FieldSampler::gradient(double t, const Vec3& x) const {
  const double h = gradient_step();
  FieldGradient g;
  for (int k = 0; k < 3; ++k) {
    Vec3 xp = x, xm = x;
    xp[k] += h;
    xm[k] -= h;
    const EMField fp = sample(t, xp), fm = sample(t, xm);
    g.dE.col(k) = (fp.E - fm.E) / (2.0 * h);
    g.dB.col(k) = (fp.B - fm.B) / (2.0 * h);
  }
  return g;
}

FieldGradient AnalyticField::gradient(double t, const Vec3& x) const {
  if (gradient_) return gradient_(t, x);
  return FieldSampler::gradient(t, x);
}

bool AnalyticField::contains(double t, const Vec3& x) const {
  if (t < t0_ || t > t1_) return false;
  if (box_) {
    for (int k = 0; k < 3; ++k)
      if (x[k] < box_->first[k] || x[k] > box_->second[k]) return false;
  }
  return true;
}

CharState advance(const CharState& st, const FieldSampler& fields, double dt) {
  const double h2 = 0.5 * dt;
  const Deriv k1 = rhs(fields, st.s, st.X, st.V);
  const Deriv k2 = rhs(fields, st.s + h2, st.X + h2 * k1.dX, st.V + h2 * k1.dV);
  const Deriv k3 = rhs(fields, st.s + h2, st.X + h2 * k2.dX, st.V + h2 * k2.dV);
  const Deriv k4 = rhs(fields, st.s + dt, st.X + dt * k3.dX, st.V + dt * k3.dV);
  CharState out;
  out.s = st.s + dt;
  out.X = st.X + dt / 6.0 * (k1.dX + 2.0 * k2.dX + 2.0 * k3.dX + k4.dX);
  out.V = st.V + dt / 6.0 * (k1.dV + 2.0 * k2.dV + 2.0 * k3.dV + k4.dV);
  return out;
}

Mat6 variational_generator(const Vec3& V, const EMField& K, const FieldGradient& dK) {
  const Momentum p(V);
  const Mat3 Dv = dvhat_dp(p);
  const Vec3 v = vhat(p);
  Mat6 M = Mat6::Zero();
  M.block<3, 3>(0, 3) = Dv;
  M.block<3, 3>(3, 0) = dK.dE + skew(v) * dK.dB;
  M.block<3, 3>(3, 3) = -skew(K.B) * Dv;
  return M;
}

CharJacobian advance_jacobian(const CharState& st, const JacobianState& jac,
                              const FieldSampler& fields, double dt) {
  struct Stage {
    Deriv d;
    Mat6 dA;
  };
  auto stage = [&](double s, const Vec3& X, const Vec3& V, const Mat6& A) {
    Stage out;
    out.d = rhs(fields, s, X, V);
    const EMField K = fields.sample(s, X);
    out.dA = variational_generator(V, K, fields.gradient(s, X)) * A;
    return out;
  };
  const double h2 = 0.5 * dt;
  const Mat6& A = jac.A;
  const Stage k1 = stage(st.s, st.X, st.V, A);
  const Stage k2 = stage(st.s + h2, st.X + h2 * k1.d.dX, st.V + h2 * k1.d.dV, A + h2 * k1.dA);
  const Stage k3 = stage(st.s + h2, st.X + h2 * k2.d.dX, st.V + h2 * k2.d.dV, A + h2 * k2.dA);
  const Stage k4 = stage(st.s + dt, st.X + dt * k3.d.dX, st.V + dt * k3.d.dV, A + dt * k3.dA);
  CharJacobian out;
  out.state.s = st.s + dt;
  out.state.X = st.X + dt / 6.0 * (k1.d.dX + 2.0 * k2.d.dX + 2.0 * k3.d.dX + k4.d.dX);
  out.state.V = st.V + dt / 6.0 * (k1.d.dV + 2.0 * k2.d.dV + 2.0 * k3.d.dV + k4.d.dV);
  out.jacobian.A = A + dt / 6.0 * (k1.dA + 2.0 * k2.dA + 2.0 * k3.dA + k4.dA);
  return out;
}

CharState integrate(const CharState& state, const FieldSampler& fields, double duration,
                    double dt) {
  const int n = step_count(duration, dt);
  const double h = duration / n;
  CharState st = state;
  for (int i = 0; i < n; ++i) st = advance(st, fields, h);
  return st;
}

CharJacobian integrate_jacobian(const CharState& state, const FieldSampler& fields,
                                double duration, double dt) {
  const int n = step_count(duration, dt);
  const double h = duration / n;
  CharJacobian cj{state, {}};
  for (int i = 0; i < n; ++i) cj = advance_jacobian(cj.state, cj.jacobian, fields, h);
  return cj;
}

FieldIntegralSeries field_integral_series(const CharState& start, const FieldSampler& fields,
                                          double T, double dt) {
  if (T < 0.0) throw std::invalid_argument("field_integral_along: T must be >= 0");
  FieldIntegralSeries out;
  out.s.push_back(start.s);
  out.cumulative.push_back(0.0);
  out.final_state = start;
  if (T == 0.0) return out;
  const int n = step_count(T, dt);
  const double h = T / n, h2 = 0.5 * h;
  CharState st = start;
  double I = 0.0;
  for (int i = 0; i < n; ++i) {
    const Deriv k1 = rhs(fields, st.s, st.X, st.V);
    const Deriv k2 = rhs(fields, st.s + h2, st.X + h2 * k1.dX, st.V + h2 * k1.dV);
    const Deriv k3 = rhs(fields, st.s + h2, st.X + h2 * k2.dX, st.V + h2 * k2.dV);
    const Deriv k4 = rhs(fields, st.s + h, st.X + h * k3.dX, st.V + h * k3.dV);
    st.X += h / 6.0 * (k1.dX + 2.0 * k2.dX + 2.0 * k3.dX + k4.dX);
    st.V += h / 6.0 * (k1.dV + 2.0 * k2.dV + 2.0 * k3.dV + k4.dV);
    I += h / 6.0 * (k1.dI + 2.0 * k2.dI + 2.0 * k3.dI + k4.dI);
    st.s = start.s + (i + 1) * h;
    out.s.push_back(st.s);
    out.cumulative.push_back(I);
  }
  out.final_state = st;
  return out;
}

double field_integral_along(const CharState& start, const FieldSampler& fields, double T,
                            double dt) {
  return field_integral_series(start, fields, T, dt).cumulative.back();
}

Trajectory::Trajectory(std::vector<double> t, std::vector<Vec3> x)
    : t_(std::move(t)), x_(std::move(x)) {
  if (t_.size() < 2 || t_.size() != x_.size())
    throw std::invalid_argument("Trajectory: need at least two matching samples");
  for (std::size_t i = 1; i < t_.size(); ++i)
    if (!(t_[i] > t_[i - 1])) throw std::invalid_argument("Trajectory: times must increase");
}

Trajectory Trajectory::from_function(const std::function<Vec3(double)>& X, double t0, double t1,
                                     int samples) {
  if (samples < 2) throw std::invalid_argument("Trajectory: samples must be >= 2");
  std::vector<double> t(samples);
  std::vector<Vec3> x(samples);
  for (int i = 0; i < samples; ++i) {
    t[i] = t0 + (t1 - t0) * i / (samples - 1);
    x[i] = X(t[i]);
  }
  return Trajectory(std::move(t), std::move(x));
}

Vec3 Trajectory::at(double t) const {
  const double eps = 1e-12 * std::max(1.0, std::abs(t_.back()));
  if (t < t_.front() - eps || t > t_.back() + eps)
    throw std::out_of_range("Trajectory: time outside sampled range");
  auto it = std::upper_bound(t_.begin(), t_.end(), t);
  std::size_t i = std::clamp<std::size_t>(it - t_.begin(), 1, t_.size() - 1);
  const double a = (t - t_[i - 1]) / (t_[i] - t_[i - 1]);
  return (1.0 - a) * x_[i - 1] + a * x_[i];
}

double Trajectory::max_speed() const {
  double v = 0.0;
  for (std::size_t i = 1; i < t_.size(); ++i)
    v = std::max(v, (x_[i] - x_[i - 1]).norm() / (t_[i] - t_[i - 1]));
  return v;
}

ConeIntegrals pallard_cone_integrals(const Trajectory& traj,
                                     const std::function<double(double, const Vec3&)>& g,
                                     double t, const PallardQuadrature& quad) {
  if (traj.max_speed() >= 1.0)
    throw std::invalid_argument("pallard_cone_integrals: trajectory is not sub-luminal");
  if (t < 0.0 || traj.t_begin() > 0.0 || traj.t_end() < t)
    throw std::invalid_argument("pallard_cone_integrals: trajectory must cover [0, t]");
  ConeIntegrals out;
  if (t == 0.0) return out;

  const QuadratureRule outer = gauss_legendre(quad.n_outer, 0.0, t);
  const QuadratureRule ct = gauss_legendre(quad.n_theta);
  const double dphi = 2.0 * std::numbers::pi / quad.n_phi;
  std::vector<Vec3> dirs;
  std::vector<double> wdir;
  for (std::size_t a = 0; a < ct.size(); ++a) {
    const double c = ct.nodes[a], sn = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int b = 0; b < quad.n_phi; ++b) {
      const double phi = (b + 0.5) * dphi;
      dirs.emplace_back(sn * std::cos(phi), sn * std::sin(phi), c);
      wdir.push_back(ct.weights[a] * dphi);
    }
  }

  for (std::size_t i = 0; i < outer.size(); ++i) {
    const double sp = outer.nodes[i];
    const Vec3 Xsp = traj.at(sp);
    const QuadratureRule inner = gauss_legendre(quad.n_inner, 0.0, sp);
    for (std::size_t j = 0; j < inner.size(); ++j) {
      const double s = inner.nodes[j], r = sp - s;
      double ang = 0.0;
      for (std::size_t d = 0; d < dirs.size(); ++d) ang += wdir[d] * g(s, Xsp + r * dirs[d]);
      const double w = outer.weights[i] * inner.weights[j] * ang;
      out.I1 += w;
      out.I0 += w * r;
    }
  }
  return out;
}

double forward_derivative_size(const Mat6& A) {
  return A.topRows<3>().norm() + A.bottomRows<3>().norm();
}

Mat6 cofactor_bound(const Mat6& A) {
  Mat6 bound;
  for (int i = 0; i < 6; ++i) {
    for (int j = 0; j < 6; ++j) {
      double prod = 1.0;
      for (int r = 0; r < 6; ++r) {
        if (r == j) continue;
        double sq = 0.0;
        for (int c = 0; c < 6; ++c)
          if (c != i) sq += A(r, c) * A(r, c);
        prod *= std::sqrt(sq);
      }
      bound(i, j) = prod;
    }
  }
  return bound;
}

void CharSupTracker::observe(const Mat6& A) {
  const double det = A.determinant();
  const Mat6 inv = A.inverse();
  forward_ = std::max(forward_, 1.0 + forward_derivative_size(A));
  backward_ = std::max(backward_, 1.0 + forward_derivative_size(inv));
  det_dev_ = std::max(det_dev_, std::abs(det - 1.0));
  const Mat6 bound = cofactor_bound(A);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (bound(i, j) > 0.0)
        cramer_ratio_ = std::max(cramer_ratio_, std::abs(inv(i, j) * det) / bound(i, j));
  ++count_;
}

void CharSupTracker::observe_bundle(const std::vector<Mat6>& As) {
  for (const auto& A : As) observe(A);
}

std::vector<CharJacobian> integrate_bundle(const std::vector<CharState>& seeds,
                                           const FieldSampler& fields, double duration,
                                           double dt, const Executor& ex) {
  std::vector<CharJacobian> out(seeds.size());
  ex.for_each_task(seeds.size(), [&](std::size_t i) {
    out[i] = integrate_jacobian(seeds[i], fields, duration, dt);
  });
  return out;
}

}  // namespace rvm::characteristics
