#include "rvm/inequality_survey.hpp"

#include <cstdio>
#include <sstream>

namespace rvm::diagnostics {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

struct Interp {
  double S, M, q;
};

}  // namespace

std::vector<InequalityRow> run_inequality_survey(const InequalitySurveySpec& spec,
                                                 const Executor& ex) {
  const Interp interp[] = {{0.0, 2.0, 2.0}, {1.0, 3.0, 3.0}, {0.5, 4.0, 1.5}};
  const std::pair<double, double> special[] = {{0.0, 3.0}, {1.0, 4.0}};
  const Prop81Spec p81[] = {{0.25, 1.0, 1.75, 2.0, 4.0}, {0.2, 0.5, 1.5, 3.0, 6.0}};

  std::vector<InequalityRow> rows;
  for (int e = 0; e < spec.ensembles; ++e) {
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(e);
    EnsembleSpec es;
    es.count = spec.particles;
    es.x_sigma = 0.2;
    es.p_sigma = Vec3(0.4, 0.3, 0.3);
    es.tail_exponent = 9.0;
    const ParticleEnsemble base = sample_ensemble(es, seed);
    for (double t : spec.times) {
      ParticleEnsemble ens = base;
      for (std::size_t k = 0; k < ens.size(); ++k) ens.x[k] += t * vhat(Momentum(ens.p[k]));
      auto add = [&](const char* check, const std::string& params, const InequalityValue& v) {
        rows.push_back({check, params, t, v, spec.grid.id(), seed});
      };
      for (const Interp& c : interp)
        add("interpolation", "S=" + num(c.S) + ";M=" + num(c.M) + ";q=" + num(c.q),
            check_interpolation(ens, c.S, c.M, c.q, spec.grid, ex));
      for (const auto& [S, M] : special)
        add("interpolation_special", "S=" + num(S) + ";M=" + num(M),
            check_interpolation_special(ens, S, M, spec.grid, ex));
      for (const Prop81Spec& s : p81)
        add("prop81",
            "eta=" + num(s.eta) + ";rho=" + num(s.rho) + ";sigma=" + num(s.sigma) +
                ";q=" + num(s.q) + ";N=" + num(s.N),
            check_prop81(ens, s, spec.grid, ex));
    }
  }
  return rows;
}

std::string inequality_csv(const std::vector<InequalityRow>& rows) {
  std::ostringstream os;
  os << "check,params,time,lhs,rhs,ratio,grid_id,seed\n";
  char buf[256];
  for (const InequalityRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g", r.time, r.value.lhs, r.value.rhs,
                  r.value.ratio());
    os << r.check << "," << r.params << "," << buf << "," << r.grid_id << "," << r.seed << "\n";
  }
  return os.str();
}

}  // namespace rvm::diagnostics
