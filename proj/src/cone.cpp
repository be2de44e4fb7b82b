#include "rvm/cone.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "rvm/kernels.hpp"
#include "rvm/quadrature.hpp"

namespace rvm {

void ConeQuadratureSpec::validate() const {
  if (n_s < 2 || n_theta < 2 || n_phi < 2)
    throw std::invalid_argument("ConeQuadratureSpec: n_s, n_theta, n_phi must all be >= 2");
  if (!(delta_vertex > 0.0 && delta_vertex <= 1.0))
    throw std::invalid_argument("ConeQuadratureSpec: delta_vertex must lie in (0, 1]");
}

ConeQuadratureSpec ConeQuadratureSpec::halved() const {
  return {std::max(2, n_s / 2), std::max(2, n_theta / 2), std::max(2, n_phi / 2), delta_vertex};
}

ConeQuadratureSpec ConeQuadratureSpec::doubled() const {
  return {2 * n_s, 2 * n_theta, 2 * n_phi, delta_vertex};
}

double biweight(double r, double R) {
  if (r >= R) return 0.0;
  const double q = 1.0 - (r * r) / (R * R);
  return 105.0 / (32.0 * std::numbers::pi * R * R * R) * q * q;
}

namespace {

struct Partial {
  Vec3 ET = Vec3::Zero(), BT = Vec3::Zero(), ES = Vec3::Zero(), BS = Vec3::Zero();
  double bound = 0.0;
  double last_node = 0.0;
};

Vec3 lerp(const Vec3f& a, const Vec3f& b, double f) {
  return (1.0 - f) * a.cast<double>() + f * b.cast<double>();
}

void check_history(double t, double s_end, const HistoryBuffer& h) {
  const double tol = 1e-9 * std::max(1.0, t);
  if (h.size() == 0 || h.t_begin() > tol || h.t_end() < s_end - tol) {
    std::ostringstream msg;
    msg << "gs_evaluate: evaluation at t = " << t << " needs history covering [0, " << s_end
        << "] (depth " << s_end << ")";
    if (h.size() > 0) msg << "; stored window is [" << h.t_begin() << ", " << h.t_end() << "]";
    throw std::out_of_range(msg.str());
  }
}

void check_data_term(double t, const Vec3& x, const HistoryBuffer& h, double R) {
  if (h.initial_data() != InitialData::Consistent)
    throw std::domain_error(
        "gs_evaluate: initial fields are not the electrostatic field of the initial charge; a "
        "data term must be supplied");
  const ParticleSnapshot& s0 = h[0];
  for (std::size_t k = 0; k < s0.x.size(); ++k) {
    if ((s0.x[k].cast<double>() - x).norm() + R >= t) {
      std::ostringstream msg;
      msg << "gs_evaluate: initial support reaches the sphere |y - x| = " << t
          << " around the evaluation point (particle " << k << "); the data term does not vanish";
      throw std::domain_error(msg.str());
    }
  }
}

Partial integrate(double t, const Vec3& x, const HistoryBuffer& h, const ConeQuadratureSpec& spec,
                  double R) {
  Partial out;
  const double stride = h.mean_stride();
  const double s_end = t - spec.delta_vertex * stride;
  const QuadratureRule srule = uniform_simpson(spec.n_s, 0.0, s_end);
  const QuadratureRule gl = gauss_legendre(spec.n_theta);
  const double dphi = 2.0 * std::numbers::pi / spec.n_phi;
  std::vector<double> cphi(spec.n_phi), sphi(spec.n_phi);
  for (int b = 0; b < spec.n_phi; ++b) {
    cphi[b] = std::cos((b + 0.5) * dphi);
    sphi[b] = std::sin((b + 0.5) * dphi);
  }
  const auto& weights = h.weights();
  const std::size_t N = weights.size();

  for (std::size_t m = 0; m < srule.size(); ++m) {
    const double s = srule.nodes[m], ws = srule.weights[m];
    const double r = t - s;
    if (!(r > 0.0)) continue;
    const auto br = h.bracket(s);
    const bool last = (m + 1 == srule.size());
    double node_mag = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
      const Vec3 xk = lerp(br.a->x[k], br.b->x[k], br.frac);
      const Vec3 d = xk - x;
      const double dist = d.norm();
      if (std::abs(dist - r) >= R) continue;

      Vec3 axis = Vec3::UnitZ();
      double cmin = -1.0;
      if (dist > 1e-14) {
        axis = d / dist;
        cmin = std::clamp((r * r + dist * dist - R * R) / (2.0 * r * dist), -1.0, 1.0);
      }
      const Vec3 helper = std::abs(axis.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
      const Vec3 e1 = axis.cross(helper).normalized();
      const Vec3 e2 = axis.cross(e1);

      const Momentum p(lerp(br.a->p[k], br.b->p[k], br.frac));
      const Vec3 E = lerp(br.a->E[k], br.b->E[k], br.frac);
      const Vec3 B = lerp(br.a->B[k], br.b->B[k], br.frac);
      const Vec3 v = vhat(p);
      const Vec3 Kt = E + v.cross(B);
      const double e2p = 1.0 + p.vec().squaredNorm();

      const double half = 0.5 * (1.0 - cmin);
      Vec3 ET = Vec3::Zero(), BT = Vec3::Zero(), ES = Vec3::Zero(), BS = Vec3::Zero();
      double bnd = 0.0;
      for (std::size_t a = 0; a < gl.size(); ++a) {
        const double c = cmin + half * (gl.nodes[a] + 1.0);
        const double rho2 = std::max(0.0, r * r + dist * dist - 2.0 * r * dist * c);
        const double W = biweight(std::sqrt(rho2), R);
        if (W == 0.0) continue;
        const double sn = std::sqrt(std::max(0.0, 1.0 - c * c));
        const double wa = half * gl.weights[a] * dphi * W;
        for (int b = 0; b < spec.n_phi; ++b) {
          const Vec3 w = (c * axis + sn * (cphi[b] * e1 + sphi[b] * e2)).normalized();
          const kernels::ConeDirection dir(w);
          const kernels::KernelT HT = kernels::eval_HT(dir, p);
          const kernels::KernelS HS = kernels::eval_HS(dir, p);
          const Eigen::Matrix<double, 6, 1> S = HS * Kt;
          ET += wa * HT.head<3>();
          BT += wa * HT.tail<3>();
          ES += wa * r * S.head<3>();
          BS += wa * r * S.tail<3>();
          const double u = one_plus_vhat_dot(p, w);
          bnd += wa / (e2p * u * std::sqrt(u));
        }
      }
      const double wk = weights[k] * ws;
      out.ET += wk * ET;
      out.BT += wk * BT;
      out.ES += wk * ES;
      out.BS += wk * BS;
      out.bound += wk * bnd;
      if (last) node_mag += weights[k] * (ET.norm() + BT.norm() + ES.norm() + BS.norm());
    }
    if (last) out.last_node = node_mag;
  }
  out.last_node *= (t - s_end);
  return out;
}

EMField total(const Partial& p) { return {p.ET + p.ES, p.BT + p.BS}; }

}  // namespace

GsResult gs_evaluate(double t, const Vec3& x, const HistoryBuffer& history,
                     const ConeQuadratureSpec& spec, const GsOptions& opt) {
  spec.validate();
  if (!(t > 0.0)) throw std::invalid_argument("gs_evaluate: t must be positive");
  if (!(opt.window_radius > 0.0))
    throw std::invalid_argument("gs_evaluate: window_radius must be positive");
  const double s_end = t - spec.delta_vertex * history.mean_stride();
  check_history(t, s_end, history);
  if (!opt.data_term) check_data_term(t, x, history, opt.window_radius);

  GsResult res;
  if (history.particles() > 0) {
    const Partial p = integrate(t, x, history, spec, opt.window_radius);
    res.K_T = {p.ET, p.BT};
    res.K_S = {p.ES, p.BS};
    res.K = total(p);
    res.dropped_vertex = p.last_node;
    res.kt_bound_integral = p.bound;
    if (opt.estimate_error) {
      const Partial q = integrate(t, x, history, spec.halved(), opt.window_radius);
      const EMField Kq = total(q);
      res.error_estimate = (res.K.E - Kq.E).norm() + (res.K.B - Kq.B).norm();
    }
  }
  if (opt.data_term) res.K += *opt.data_term;
  return res;
}

std::vector<GsResult> gs_evaluate_many(double t, const std::vector<Vec3>& xs,
                                       const HistoryBuffer& history,
                                       const ConeQuadratureSpec& spec, const GsOptions& opt,
                                       const Executor& ex) {
  std::vector<GsResult> out(xs.size());
  ex.for_each_task(xs.size(), [&](std::size_t i) {
    out[i] = gs_evaluate(t, xs[i], history, spec, opt);
  });
  return out;
}

double wave_cone_integral(const SpaceTimeScalar& F, double t, const Vec3& x,
                          const ConeQuadratureSpec& spec) {
  spec.validate();
  if (t < 0.0) throw std::invalid_argument("wave_cone_integral: t must be >= 0");
  if (t == 0.0) return 0.0;
  const QuadratureRule srule = uniform_simpson(spec.n_s, 0.0, t);
  const QuadratureRule gl = gauss_legendre(spec.n_theta);
  const double dphi = 2.0 * std::numbers::pi / spec.n_phi;
  std::vector<Vec3> dirs;
  std::vector<double> wdir;
  for (std::size_t a = 0; a < gl.size(); ++a) {
    const double c = gl.nodes[a], sn = std::sqrt(std::max(0.0, 1.0 - c * c));
    for (int b = 0; b < spec.n_phi; ++b) {
      const double phi = (b + 0.5) * dphi;
      dirs.emplace_back(sn * std::cos(phi), sn * std::sin(phi), c);
      wdir.push_back(gl.weights[a] * dphi);
    }
  }
  double u = 0.0;
  for (std::size_t m = 0; m < srule.size(); ++m) {
    const double s = srule.nodes[m], r = t - s;
    if (r == 0.0) continue;
    double ang = 0.0;
    for (std::size_t d = 0; d < dirs.size(); ++d) ang += wdir[d] * F(s, x + r * dirs[d]);
    u += srule.weights[m] * r * ang;
  }
  return u;
}

}  // namespace rvm
