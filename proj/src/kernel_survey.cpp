#include "rvm/kernel_survey.hpp"

#include <cmath>
#include <numbers>

#include "rvm/random.hpp"

namespace rvm::kernels {

const char* bound_name(Bound b) {
  switch (b) {
    case Bound::HT: return "HT";
    case Bound::HS: return "HS";
    case Bound::b: return "b";
    case Bound::Singularity: return "singularity";
  }
  return "?";
}

double bound_ratio(Bound b, const KernelSample& s) {
  switch (b) {
    case Bound::HT: return ratio_HT(s);
    case Bound::HS: return ratio_HS(s);
    case Bound::b: return ratio_b(s);
    case Bound::Singularity: return singularity_bound(ConeDirection(s.w), s.p).ratio();
  }
  return 0.0;
}

OracleConstant oracle_constant(Bound b, double p_min, double p_max, double theta_min, int n_p,
                               int n_theta) {
  OracleConstant best;
  const double lp0 = std::log(p_min), lp1 = std::log(p_max);
  const double lt0 = std::log(theta_min), lt1 = std::log(std::numbers::pi);
  for (int i = 0; i < n_p; ++i) {
    const double r = std::exp(lp0 + (lp1 - lp0) * i / (n_p - 1));
    for (int j = 0; j < n_theta; ++j) {
      const double th = std::exp(lt0 + (lt1 - lt0) * j / (n_theta - 1));
      KernelSample s;
      s.p = Momentum(0.0, 0.0, r);
      s.w = rotate_away(-Vec3::UnitZ(), th, 0.0);
      const double v = bound_ratio(b, s);
      if (v > best.value) best = {v, r, th};
    }
  }
  return best;
}

nlohmann::ordered_json verify_kernels_report(std::uint64_t samples, std::uint64_t seed,
                                             const Executor& ex) {
  const KernelBoundSurvey sv = survey_kernel_bounds(samples, seed, ex);
  auto vec = [](const Vec3& v) { return nlohmann::ordered_json::array({v.x(), v.y(), v.z()}); };
  nlohmann::ordered_json j;
  j["samples"] = samples;
  j["seed"] = seed;
  j["domain"] = {{"p_min", 1e-3}, {"p_max", 1e3}, {"theta_min", 1e-6}};
  nlohmann::ordered_json bounds;
  const std::pair<Bound, const BoundMax*> all[] = {
      {Bound::HT, &sv.HT}, {Bound::HS, &sv.HS}, {Bound::b, &sv.b}, {Bound::Singularity, &sv.sing}};
  const char* what[] = {"|H_T| p0^2 (1 + vhat.w)^{3/2}", "|H_S|_F p0 (1 + vhat.w)",
                        "|b|_F / p0^2", "(1 + vhat.w)^{-1} / min(theta^-2, p0^2)"};
  int i = 0;
  for (const auto& [b, m] : all) {
    const OracleConstant oc = oracle_constant(b);
    bounds[bound_name(b)] = {
        {"quantity", what[i++]},
        {"oracle_constant", oc.value},
        {"oracle_argmax", {{"p_norm", oc.p_norm}, {"theta", oc.theta}}},
        {"max_ratio", m->value},
        {"max_over_oracle", m->value / oc.value},
        {"argmax", {{"p", vec(m->argmax.p.vec())}, {"w", vec(m->argmax.w)}}}};
  }
  j["bounds"] = bounds;
  return j;
}

}  // namespace rvm::kernels
