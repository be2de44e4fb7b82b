#include "rvm/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <numeric>
#include <sstream>

#include "rvm/cone.hpp"
#include "rvm/electrostatics.hpp"
#include "rvm/random.hpp"
#include "rvm/snapshot_io.hpp"

namespace rvm::monitor {

namespace {

constexpr double kFourPi = 4.0 * std::numbers::pi;
constexpr std::uint64_t kBundleStream = 0xB0DD1Eull;

using characteristics::CharJacobian;
using characteristics::CharState;
using characteristics::JacobianState;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string short_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

std::string pair_name(const NormPair& p) {
  return "M_theta" + short_num(p.theta) + "_q" + p.q.str();
}

bool finite_state(const std::vector<Vec3>& a) {
  for (const Vec3& v : a)
    if (!is_finite(v)) return false;
  return true;
}

std::vector<std::size_t> choose_bundle(const ParticleEnsemble& ens, std::size_t size,
                                       std::uint64_t seed, std::size_t& n_top) {
  const std::size_t n = ens.size();
  size = std::min(size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return ens.p[a].squaredNorm() > ens.p[b].squaredNorm();
  });
  n_top = (size + 1) / 2;
  std::vector<std::size_t> out(order.begin(), order.begin() + n_top);
  std::vector<std::size_t> rest(order.begin() + n_top, order.end());
  std::sort(rest.begin(), rest.end());
  SplitMix64 rng(seed, kBundleStream);
  for (std::size_t i = 0; i < size - n_top; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (rest.size() - i));
    std::swap(rest[i], rest[j]);
    out.push_back(rest[i]);
  }
  return out;
}

// Everything measured at one integer time level.
struct LevelInput {
  const std::vector<Vec3>* x;
  const std::vector<Vec3>* p;
  double field_energy;
  double kinetic;
  double max_div_B;
  std::vector<double> E_norm;  // per moment order, ||E||_{L^{N+3}}
  std::vector<double> B_norm;
};

}  // namespace

std::string regime_label(double theta, const diagnostics::Exponent& q) {
  const double inv_q = q.is_infinite() ? 0.0 : 1.0 / q.value();
  const bool pallard = theta > 4.0 * inv_q && q.value() >= 6.0;
  const bool paper = theta > 2.0 * inv_q && q.value() > 2.0;
  if (pallard) return "paper+pallard";
  if (paper) return "paper";
  return "outside";
}

EMField GridPairSampler::sample(double t, const Vec3& x) const {
  const double span = b_.t - a_.t;
  double lam = span > 0.0 ? (t - a_.t) / span : 0.0;
  lam = std::clamp(lam, 0.0, 1.0);
  const EMField fa = a_.sample(x), fb = b_.sample(x);
  return (1.0 - lam) * fa + lam * fb;
}

CriteriaReport run_scenario(const ScenarioConfig& cfg, const Executor& ex) {
  CriteriaReport rep;
  rep.config = cfg;
  for (const NormPair& p : cfg.criteria.pairs) rep.pair_labels.push_back(regime_label(p.theta, p.q));

  const Grid3 grid(cfg.L, cfg.n);
  const diagnostics::BinningGrid bins = diagnostics::BinningGrid::around(grid, cfg.criteria.binning_cells);
  ParticleEnsemble ens = sample_ensemble(cfg.particles, cfg.seed);
  rep.particles = ens.size();
  const double dt = cfg.dt;
  const int steps = cfg.steps();
  const bool sc = cfg.engine == Engine::SelfConsistent;

  FieldState fields(grid);
  if (sc && cfg.initial_fields == InitialFields::Electrostatic)
    set_electrostatic_field(deposit_charge(ens.x, ens.w, grid, ex), fields);

  rep.bundle = choose_bundle(ens, cfg.criteria.bundle_size, cfg.seed, rep.bundle_top);
  std::vector<CharState> bstate(rep.bundle.size());
  std::vector<JacobianState> bjac(rep.bundle.size());
  std::vector<double> bint(rep.bundle.size(), 0.0);
  for (std::size_t i = 0; i < rep.bundle.size(); ++i)
    bstate[i] = {0.0, ens.x[rep.bundle[i]], ens.p[rep.bundle[i]]};
  characteristics::CharSupTracker tracker;

  std::optional<HistoryBuffer> history;
  if (sc && !cfg.probes.empty()) history.emplace(ens.w, cfg.T + 2.0 * dt, InitialData::Consistent);
  if (sc) prepare_leapfrog(ens, fields, dt, ex);

  const characteristics::ZeroField zero_field;
  const characteristics::UniformField uniform_field(cfg.external_E, cfg.external_B);
  const EMField external{cfg.external_E, cfg.external_B};
  const double box_volume = grid.L() * grid.L() * grid.L();

  const std::size_t n_mom = cfg.criteria.moments.size();
  std::vector<double> int_E(n_mom, 0.0), int_B(n_mom, 0.0), prev_E(n_mom), prev_B(n_mom);
  std::vector<double> moment0(n_mom, 0.0);
  double pallard_int = 0.0, prev_pallard = 0.0;
  const double total_weight = ens.total_weight(ex);

  auto pallard_integrand = [&](const std::vector<Vec3>& x, const std::vector<Vec3>& p,
                               const std::vector<EMField>* K) {
    const std::size_t n = x.size();
    std::vector<double> fp(n), kfp(n);
    for (std::size_t k = 0; k < n; ++k) {
      fp[k] = ens.w[k] * p0(Momentum(p[k]));
      const double mag = K ? (*K)[k].magnitude_sum() : external.magnitude_sum();
      kfp[k] = fp[k] * (sc || cfg.engine == Engine::External ? mag : 0.0);
    }
    const double dv = bins.h() * bins.h() * bins.h();
    return diagnostics::lq_norm(diagnostics::cell_densities(x, kfp, bins, ex), 4.0, dv) +
           diagnostics::lq_norm(diagnostics::cell_densities(x, fp, bins, ex), 4.0, dv);
  };

  auto record = [&](int n, const LevelInput& in, const std::vector<EMField>* K) {
    const double t = n * dt;
    const double g = pallard_integrand(*in.x, *in.p, K);
    if (n > 0) pallard_int += 0.5 * dt * (g + prev_pallard);
    prev_pallard = g;
    for (std::size_t i = 0; i < n_mom; ++i) {
      if (n > 0) {
        int_E[i] += 0.5 * dt * (in.E_norm[i] + prev_E[i]);
        int_B[i] += 0.5 * dt * (in.B_norm[i] + prev_B[i]);
      }
      prev_E[i] = in.E_norm[i];
      prev_B[i] = in.B_norm[i];
    }
    if (n % cfg.criteria.cadence != 0 && n != steps) return;
    ParticleEnsemble view;
    view.x = *in.x;
    view.p = *in.p;
    view.w = ens.w;

    ReportRow row;
    row.step = n;
    row.t = t;
    row.kappa = ordered_max(ex, view.size(), [&](std::size_t k) { return view.p[k].norm(); });
    row.K_integral_max = bint.empty() ? 0.0 : *std::max_element(bint.begin(), bint.end());
    row.field_energy = in.field_energy;
    row.kinetic = in.kinetic;
    row.energy = in.field_energy + in.kinetic;
    row.total_weight = total_weight;
    std::vector<characteristics::Mat6> As(bjac.size());
    for (std::size_t i = 0; i < bjac.size(); ++i) As[i] = bjac[i].A;
    tracker.observe_bundle(As);
    row.det_deviation = tracker.det_deviation();
    row.F_sup = tracker.forward();
    row.B_sup = tracker.backward();
    row.max_div_B = in.max_div_B;
    row.pallard_rhs = 1.0 + pallard_int;
    for (const NormPair& p : cfg.criteria.pairs)
      row.M.push_back(diagnostics::weighted_norm(view, {p.theta, p.q, bins}, ex));
    for (std::size_t i = 0; i < n_mom; ++i) {
      const double N = cfg.criteria.moments[i];
      double m;
      try {
        m = diagnostics::moment(view, N, ex);
      } catch (const std::overflow_error& e) {
        throw NumericalFailure("step " + std::to_string(n) + ": " + e.what());
      }
      if (n == 0) moment0[i] = m;
      row.moments.push_back(m);
      row.moment_rhs.push_back(moment0[i] + std::pow(int_E[i], N + 3.0) +
                               std::pow(int_B[i], N + 3.0));
    }
    rep.rows.push_back(std::move(row));
    rep.bundle_integrals.push_back(bint);
  };

  auto advance_bundle = [&](const characteristics::FieldSampler& sampler, double t0) {
    ex.for_each_task(rep.bundle.size(), [&](std::size_t i) {
      CharState s = bstate[i];
      s.s = t0;
      const auto series = characteristics::field_integral_series(s, sampler, dt, dt);
      const CharJacobian cj = characteristics::advance_jacobian(s, bjac[i], sampler, dt);
      bint[i] += series.cumulative.back();
      bstate[i] = cj.state;
      bjac[i] = cj.jacobian;
    });
  };

  auto fail_if_nan = [&](int n, const std::vector<Vec3>& x, const std::vector<Vec3>& p,
                         const FieldState* f) {
    if (!finite_state(x) || !finite_state(p))
      throw NumericalFailure("non-finite particle state at step " + std::to_string(n));
    if (f && !f->all_finite())
      throw NumericalFailure("non-finite field at step " + std::to_string(n));
  };

  auto field_norms = [&](const FieldState* f, LevelInput& in) {
    for (double N : cfg.criteria.moments) {
      const double r = N + 3.0;
      if (f) {
        const diagnostics::FieldNorms fn = diagnostics::field_lr_norms(*f, r);
        in.E_norm.push_back(fn.E);
        in.B_norm.push_back(fn.B);
      } else if (cfg.engine == Engine::External) {
        in.E_norm.push_back(cfg.external_E.norm() * std::pow(box_volume, 1.0 / r));
        in.B_norm.push_back(cfg.external_B.norm() * std::pow(box_volume, 1.0 / r));
      } else {
        in.E_norm.push_back(0.0);
        in.B_norm.push_back(0.0);
      }
    }
  };

  if (!sc) {
    const double ext_energy = cfg.engine == Engine::External
                                  ? 0.5 * (cfg.external_E.squaredNorm() + cfg.external_B.squaredNorm()) * box_volume
                                  : 0.0;
    for (int n = 0; n <= steps; ++n) {
      LevelInput in{&ens.x, &ens.p, ext_energy, 0.0, 0.0, {}, {}};
      in.kinetic = kFourPi * ordered_sum(ex, ens.size(), [&](std::size_t k) {
                     return ens.w[k] * p0(Momentum(ens.p[k]));
                   });
      field_norms(nullptr, in);
      record(n, in, nullptr);
      if (n == steps) break;
      if (cfg.engine == Engine::FreeStreaming) {
        advance_bundle(zero_field, n * dt);
        for (std::size_t k = 0; k < ens.size(); ++k) ens.x[k] += dt * vhat(Momentum(ens.p[k]));
      } else {
        advance_bundle(uniform_field, n * dt);
        for (std::size_t k = 0; k < ens.size(); ++k) {
          const Vec3 p_new = boris_push(ens.p[k], external, dt);
          ens.x[k] += dt * vhat(Momentum(0.5 * (ens.p[k] + p_new)));
          ens.p[k] = p_new;
        }
      }
      fail_if_nan(n + 1, ens.x, ens.p, nullptr);
    }
  } else {
    std::vector<EMField> gathered;
    for (int n = 0; n <= steps; ++n) {
      FieldState before = fields;
      std::vector<Vec3> x_n = ens.x, p_half = ens.p;
      PicStepRecord rec;
      try {
        rec = pic_step(ens, fields, dt, ex, history ? &*history : nullptr, &gathered);
      } catch (const std::invalid_argument& e) {
        throw NumericalFailure(std::string("step ") + std::to_string(n) + ": " + e.what());
      }
      fail_if_nan(n, ens.x, ens.p, &fields);
      std::vector<Vec3> p_n(ens.size());
      for (std::size_t k = 0; k < ens.size(); ++k) p_n[k] = 0.5 * (p_half[k] + ens.p[k]);
      LevelInput in{&x_n, &p_n, rec.field_energy, rec.kinetic, before.max_abs_div_B(), {}, {}};
      field_norms(&before, in);
      record(n, in, &gathered);
      if (n == steps) {
        rep.final_fields = std::move(before);
        break;
      }
      advance_bundle(GridPairSampler(before, fields), n * dt);
    }
    if (history) {
      GsOptions opt;
      opt.window_radius = cfg.window_radius > 0.0 ? cfg.window_radius : 1.5 * grid.h();
      opt.estimate_error = false;
      std::vector<GsResult> gs;
      try {
        gs = gs_evaluate_many(cfg.T, cfg.probes, *history, cfg.quadrature, opt, ex);
      } catch (const std::domain_error& e) {
        throw ConfigError("probes", e.what());
      } catch (const std::out_of_range& e) {
        throw ConfigError("probes", e.what());
      }
      for (std::size_t i = 0; i < cfg.probes.size(); ++i) {
        ProbeResult pr;
        pr.x = cfg.probes[i];
        pr.gs = gs[i].K;
        pr.fdtd = rep.final_fields->sample_cubic(cfg.probes[i]);
        const double kt = gs[i].K_T.E.norm() + gs[i].K_T.B.norm();
        pr.kt_bound_ratio = gs[i].kt_bound_integral > 0.0 ? kt / gs[i].kt_bound_integral : 0.0;
        rep.probes.push_back(pr);
      }
    }
  }
  return rep;
}

PallardBound pallard_bound_check(const CriteriaReport& report) {
  if (report.rows.empty()) return {0.0, 1.0};
  return {report.rows.back().K_integral_max, report.rows.back().pallard_rhs};
}

std::string criteria_csv(const CriteriaReport& r) {
  std::ostringstream os;
  os << "step,t,kappa,K_integral_max,energy,field_energy,kinetic,total_weight,det_deviation,"
        "F_sup,B_sup,max_div_B,pallard_rhs";
  for (const NormPair& p : r.config.criteria.pairs) os << "," << pair_name(p);
  for (double N : r.config.criteria.moments) os << ",moment_N" << short_num(N);
  for (double N : r.config.criteria.moments) os << ",moment_rhs_N" << short_num(N);
  os << "\n";
  for (const ReportRow& row : r.rows) {
    os << row.step << "," << fmt(row.t) << "," << fmt(row.kappa) << "," << fmt(row.K_integral_max)
       << "," << fmt(row.energy) << "," << fmt(row.field_energy) << "," << fmt(row.kinetic) << ","
       << fmt(row.total_weight) << "," << fmt(row.det_deviation) << "," << fmt(row.F_sup) << ","
       << fmt(row.B_sup) << "," << fmt(row.max_div_B) << "," << fmt(row.pallard_rhs);
    for (double v : row.M) os << "," << fmt(v);
    for (double v : row.moments) os << "," << fmt(v);
    for (double v : row.moment_rhs) os << "," << fmt(v);
    os << "\n";
  }
  return os.str();
}

std::string bundle_csv(const CriteriaReport& r) {
  std::ostringstream os;
  os << "step,t,member,particle,selection,K_integral\n";
  for (std::size_t i = 0; i < r.rows.size(); ++i)
    for (std::size_t m = 0; m < r.bundle.size(); ++m)
      os << r.rows[i].step << "," << fmt(r.rows[i].t) << "," << m << "," << r.bundle[m] << ","
         << (m < r.bundle_top ? "top_p" : "random") << "," << fmt(r.bundle_integrals[i][m]) << "\n";
  return os.str();
}

nlohmann::ordered_json schema_json(const CriteriaReport& r) {
  using oj = nlohmann::ordered_json;
  oj crit = oj::array();
  auto col = [&](oj& arr, const std::string& name, const std::string& desc) {
    arr.push_back({{"name", name}, {"description", desc}});
  };
  col(crit, "step", "time step index n");
  col(crit, "t", "time n * dt");
  col(crit, "kappa", "max_k |p_k|, the momentum-support radius of the particle f");
  col(crit, "K_integral_max", "bundle max of the cumulative integral of |E| + |B| along characteristics");
  col(crit, "energy", "field_energy + kinetic");
  col(crit, "field_energy", "1/2 sum (|E|^2 + |B|^2) h^3 (external engine: uniform field over the box)");
  col(crit, "kinetic", "4 pi sum_k w_k p0(p_k); self-consistent runs average the two half-step momenta");
  col(crit, "total_weight", "sum_k w_k");
  col(crit, "det_deviation", "running max over the bundle of |det A - 1|");
  col(crit, "F_sup", "running max over the bundle of 1 + |grad X| + |grad V| (forward)");
  col(crit, "B_sup", "same quantity from the inverse Jacobians (backward)");
  col(crit, "max_div_B", "max over cells of the discrete div B");
  col(crit, "pallard_rhs", "1 + int_0^t ||K f p0||_{L^4_x L^1_p} + int_0^t ||f p0||_{L^4_x L^1_p}");
  for (std::size_t i = 0; i < r.config.criteria.pairs.size(); ++i) {
    const NormPair& p = r.config.criteria.pairs[i];
    col(crit, pair_name(p), "||p0^theta f||_{L^q_x L^1_p} on the binning grid; regime " + r.pair_labels[i]);
  }
  for (double N : r.config.criteria.moments)
    col(crit, "moment_N" + short_num(N), "sum_k w_k p0(p_k)^N");
  for (double N : r.config.criteria.moments)
    col(crit, "moment_rhs_N" + short_num(N),
        "initial moment + (int ||E||_{L^{N+3}} dt)^{N+3} + (int ||B||_{L^{N+3}} dt)^{N+3}");
  oj bundle = oj::array();
  col(bundle, "step", "time step index n");
  col(bundle, "t", "time");
  col(bundle, "member", "position in the bundle");
  col(bundle, "particle", "index of the seeding particle");
  col(bundle, "selection", "top_p (largest initial |p|) or random");
  col(bundle, "K_integral", "cumulative integral of |E| + |B| along this characteristic");
  oj probes = oj::array();
  col(probes, "x,y,z", "evaluation point at t = T");
  col(probes, "gs_Ex..gs_Bz", "cone-integral field");
  col(probes, "fdtd_Ex..fdtd_Bz", "grid field, tricubic interpolation");
  col(probes, "kt_bound_ratio", "(|E_T| + |B_T|) / bound integral");
  oj j;
  j["format"] = "%.17g decimal, comma separated, one header line";
  j["criteria.csv"] = crit;
  j["bundle.csv"] = bundle;
  j["probes.csv"] = probes;
  j["fields_final"] = "see fields_final.json";
  return j;
}

nlohmann::ordered_json summary_json(const CriteriaReport& r) {
  using oj = nlohmann::ordered_json;
  oj j;
  j["engine"] = engine_name(r.config.engine);
  j["particles"] = r.particles;
  j["steps"] = r.config.steps();
  j["bundle"] = {{"size", r.bundle.size()},
                 {"top_p", r.bundle_top},
                 {"random", r.bundle.size() - r.bundle_top},
                 {"coverage", "criterion sup taken over " + std::to_string(r.bundle.size()) +
                                  " of " + std::to_string(r.particles) + " characteristics"}};
  oj pairs = oj::array();
  for (std::size_t i = 0; i < r.config.criteria.pairs.size(); ++i)
    pairs.push_back({{"name", pair_name(r.config.criteria.pairs[i])}, {"regime", r.pair_labels[i]}});
  j["pairs"] = pairs;
  const PallardBound pb = pallard_bound_check(r);
  j["pallard_bound"] = {{"lhs", pb.lhs}, {"rhs", pb.rhs}, {"ratio", pb.ratio()}};
  if (!r.rows.empty()) {
    const ReportRow& a = r.rows.front();
    const ReportRow& b = r.rows.back();
    j["kappa"] = {{"initial", a.kappa}, {"final", b.kappa}};
    j["energy"] = {{"initial", a.energy}, {"final", b.energy},
                   {"relative_drift", a.energy != 0.0 ? (b.energy - a.energy) / a.energy : 0.0}};
  }
  j["kappa_note"] = "kappa is the max |p_k| over particles, exact for the particle representation of f";
  return j;
}

void write_run(const CriteriaReport& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  auto put = [&](const char* name, const std::string& text) {
    std::ofstream os(dir / name, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + (dir / name).string());
    os << text;
  };
  put("config.json", to_json(r.config).dump(2) + "\n");
  put("criteria.csv", criteria_csv(r));
  put("bundle.csv", bundle_csv(r));
  put("schema.json", schema_json(r).dump(2) + "\n");
  put("summary.json", summary_json(r).dump(2) + "\n");
  if (!r.probes.empty()) {
    std::ostringstream os;
    os << "x,y,z,gs_Ex,gs_Ey,gs_Ez,gs_Bx,gs_By,gs_Bz,fdtd_Ex,fdtd_Ey,fdtd_Ez,fdtd_Bx,fdtd_By,"
          "fdtd_Bz,kt_bound_ratio\n";
    for (const ProbeResult& p : r.probes) {
      os << fmt(p.x.x()) << "," << fmt(p.x.y()) << "," << fmt(p.x.z());
      for (const Vec3* v : {&p.gs.E, &p.gs.B, &p.fdtd.E, &p.fdtd.B})
        for (int i = 0; i < 3; ++i) os << "," << fmt((*v)[i]);
      os << "," << fmt(p.kt_bound_ratio) << "\n";
    }
    put("probes.csv", os.str());
  }
  if (r.final_fields) write_field_snapshot(*r.final_fields, dir / "fields_final");
}

std::string summarize_run(const std::filesystem::path& dir) {
  std::ifstream sj(dir / "summary.json");
  std::ifstream cs(dir / "criteria.csv");
  if (!sj || !cs) throw std::runtime_error("not a run directory: " + dir.string());
  const nlohmann::json s = nlohmann::json::parse(sj);
  std::string header, line;
  std::getline(cs, header);
  std::vector<std::string> cols;
  {
    std::stringstream hs(header);
    std::string c;
    while (std::getline(hs, c, ',')) cols.push_back(c);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(cs, line)) {
    if (line.empty()) continue;
    std::stringstream ls(line);
    std::string c;
    std::vector<double> v;
    while (std::getline(ls, c, ',')) v.push_back(std::stod(c));
    rows.push_back(std::move(v));
  }
  std::ostringstream os;
  os << "run: " << dir.string() << "\n";
  os << "engine: " << s.at("engine").get<std::string>() << ", particles "
     << s.at("particles").get<std::size_t>() << ", steps " << s.at("steps").get<int>() << "\n";
  os << "bundle: " << s.at("bundle").at("coverage").get<std::string>() << "\n";
  for (const auto& p : s.at("pairs"))
    os << "pair " << p.at("name").get<std::string>() << ": " << p.at("regime").get<std::string>()
       << "\n";
  if (!rows.empty()) {
    os << "column                      initial                  final                    max\n";
    for (std::size_t c = 2; c < cols.size(); ++c) {
      double mx = rows.front()[c];
      for (const auto& r : rows) mx = std::max(mx, r[c]);
      char buf[160];
      std::snprintf(buf, sizeof buf, "%-26s  %-23.16g  %-23.16g  %.16g\n", cols[c].c_str(),
                    rows.front()[c], rows.back()[c], mx);
      os << buf;
    }
  }
  const auto& pb = s.at("pallard_bound");
  os << "pallard bound: lhs " << pb.at("lhs").get<double>() << ", rhs " << pb.at("rhs").get<double>()
     << ", ratio " << pb.at("ratio").get<double>() << "\n";
  return os.str();
}

}  // namespace rvm::monitor
