#include "rvm/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "rvm/grid.hpp"

namespace rvm::monitor {

namespace {

using nlohmann::json;

// Typed access into one JSON object; every failure carries the dotted path.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "expected an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    std::set<std::string> ok(keys.begin(), keys.end());
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!ok.count(it.key())) fail(sub(it.key()), "unknown key");
  }

  bool has(const char* key) const { return j_.contains(key); }
  const json& raw(const char* key) const { return j_.at(key); }
  std::string sub(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  double number(const char* key, double dflt, bool required = false) const {
    if (!j_.contains(key)) {
      if (required) fail(sub(key), "required");
      return dflt;
    }
    return as_number(j_.at(key), sub(key));
  }

  long long integer(const char* key, long long dflt) const {
    if (!j_.contains(key)) return dflt;
    const json& v = j_.at(key);
    if (!v.is_number_integer()) fail(sub(key), "expected an integer");
    return v.get<long long>();
  }

  std::string string(const char* key, const std::string& dflt) const {
    if (!j_.contains(key)) return dflt;
    const json& v = j_.at(key);
    if (!v.is_string()) fail(sub(key), "expected a string");
    return v.get<std::string>();
  }

  Vec3 vec3(const char* key, const Vec3& dflt) const {
    if (!j_.contains(key)) return dflt;
    return as_vec3(j_.at(key), sub(key));
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "must be finite");
    return d;
  }

  static Vec3 as_vec3(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 3) fail(path, "expected an array of 3 numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i) out[i] = as_number(v[i], path + "[" + std::to_string(i) + "]");
    return out;
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path, msg);
  }

 private:
  const json& j_;
  std::string path_;
};

void positive(double v, const std::string& path) {
  if (!(v > 0.0)) throw ConfigError(path, "must be positive");
}

void non_negative(double v, const std::string& path) {
  if (!(v >= 0.0)) throw ConfigError(path, "must be non-negative");
}

EnsembleSpec parse_particles(const Reader& r) {
  r.allow({"count", "total_weight", "space", "center", "x_sigma", "x_cutoff", "box_L", "p_sigma",
           "p_drift", "tail_exponent", "p_cutoff"});
  EnsembleSpec s;
  const long long count = r.integer("count", static_cast<long long>(s.count));
  if (count < 0) throw ConfigError(r.sub("count"), "must be non-negative");
  s.count = static_cast<std::size_t>(count);
  s.total_weight = r.number("total_weight", s.total_weight);
  positive(s.total_weight, r.sub("total_weight"));
  const std::string space = r.string("space", "gaussian");
  if (space == "gaussian")
    s.space = EnsembleSpec::Space::Gaussian;
  else if (space == "uniform")
    s.space = EnsembleSpec::Space::Uniform;
  else
    throw ConfigError(r.sub("space"), "expected \"gaussian\" or \"uniform\"");
  s.center = r.vec3("center", s.center);
  s.x_sigma = r.number("x_sigma", s.x_sigma);
  positive(s.x_sigma, r.sub("x_sigma"));
  s.x_cutoff = r.number("x_cutoff", s.x_cutoff);
  non_negative(s.x_cutoff, r.sub("x_cutoff"));
  s.box_L = r.number("box_L", s.box_L);
  positive(s.box_L, r.sub("box_L"));
  s.p_sigma = r.vec3("p_sigma", s.p_sigma);
  for (int i = 0; i < 3; ++i) non_negative(s.p_sigma[i], r.sub("p_sigma") + "[" + std::to_string(i) + "]");
  s.p_drift = r.vec3("p_drift", s.p_drift);
  s.tail_exponent = r.number("tail_exponent", s.tail_exponent);
  non_negative(s.tail_exponent, r.sub("tail_exponent"));
  s.p_cutoff = r.number("p_cutoff", s.p_cutoff);
  non_negative(s.p_cutoff, r.sub("p_cutoff"));
  return s;
}

CriteriaConfig parse_criteria(const Reader& r) {
  r.allow({"pairs", "moments", "bundle_size", "cadence", "binning_cells"});
  CriteriaConfig c;
  if (r.has("pairs")) {
    const json& arr = r.raw("pairs");
    const std::string path = r.sub("pairs");
    if (!arr.is_array()) throw ConfigError(path, "expected an array of [theta, q] pairs");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string pi = path + "[" + std::to_string(i) + "]";
      const json& e = arr[i];
      if (!e.is_array() || e.size() != 2) throw ConfigError(pi, "expected [theta, q]");
      const double theta = Reader::as_number(e[0], pi + "[0]");
      non_negative(theta, pi + "[0]");
      double q;
      if (e[1].is_string() && e[1].get<std::string>() == "inf")
        q = std::numeric_limits<double>::infinity();
      else
        q = Reader::as_number(e[1], pi + "[1]");
      if (!(q >= 1.0)) throw ConfigError(pi + "[1]", "q must be >= 1 or \"inf\"");
      c.pairs.push_back({theta, diagnostics::Exponent(q)});
    }
  } else {
    c.pairs = {{1.0, diagnostics::Exponent(4.0)}, {1.0, diagnostics::Exponent::infinity()}};
  }
  if (r.has("moments")) {
    const json& arr = r.raw("moments");
    if (!arr.is_array()) throw ConfigError(r.sub("moments"), "expected an array of numbers");
    c.moments.clear();
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string pi = r.sub("moments") + "[" + std::to_string(i) + "]";
      c.moments.push_back(Reader::as_number(arr[i], pi));
      non_negative(c.moments.back(), pi);
    }
  }
  const long long bundle = r.integer("bundle_size", static_cast<long long>(c.bundle_size));
  if (bundle < 0) throw ConfigError(r.sub("bundle_size"), "must be non-negative");
  c.bundle_size = static_cast<std::size_t>(bundle);
  c.cadence = static_cast<int>(r.integer("cadence", c.cadence));
  if (c.cadence < 1) throw ConfigError(r.sub("cadence"), "must be >= 1");
  c.binning_cells = static_cast<int>(r.integer("binning_cells", c.binning_cells));
  if (c.binning_cells < 1) throw ConfigError(r.sub("binning_cells"), "must be >= 1");
  return c;
}

ConeQuadratureSpec parse_quadrature(const Reader& r) {
  r.allow({"n_s", "n_theta", "n_phi", "delta_vertex"});
  ConeQuadratureSpec q;
  q.n_s = static_cast<int>(r.integer("n_s", q.n_s));
  q.n_theta = static_cast<int>(r.integer("n_theta", q.n_theta));
  q.n_phi = static_cast<int>(r.integer("n_phi", q.n_phi));
  q.delta_vertex = r.number("delta_vertex", q.delta_vertex);
  try {
    q.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError("quadrature", e.what());
  }
  return q;
}

}  // namespace

const char* engine_name(Engine e) {
  switch (e) {
    case Engine::FreeStreaming: return "free_streaming";
    case Engine::External: return "external";
    case Engine::SelfConsistent: return "self_consistent";
  }
  return "?";
}

int ScenarioConfig::steps() const { return static_cast<int>(std::llround(T / dt)); }

ScenarioConfig parse_scenario(const nlohmann::json& j) {
  const Reader r(j, "");
  r.allow({"grid", "dt", "T", "seed", "particles", "engine", "external", "initial_fields",
           "quadrature", "probes", "window_radius", "criteria", "output"});
  ScenarioConfig c;
  if (!r.has("grid")) throw ConfigError("grid", "required");
  {
    const Reader g(r.raw("grid"), "grid");
    g.allow({"L", "n"});
    c.L = g.number("L", c.L, true);
    positive(c.L, "grid.L");
    c.n = static_cast<int>(g.integer("n", c.n));
    if (c.n < 8) throw ConfigError("grid.n", "must be >= 8");
  }
  c.dt = r.number("dt", c.dt, true);
  positive(c.dt, "dt");
  c.T = r.number("T", c.T, true);
  positive(c.T, "T");
  if (std::abs(c.steps() * c.dt - c.T) > 1e-9 * c.T || c.steps() < 1)
    throw ConfigError("T", "must be a positive integer multiple of dt");
  if (r.has("seed")) {
    const json& s = r.raw("seed");
    if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
      throw ConfigError("seed", "expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (r.has("particles")) c.particles = parse_particles(Reader(r.raw("particles"), "particles"));

  const std::string engine = r.string("engine", "free_streaming");
  if (engine == "free_streaming")
    c.engine = Engine::FreeStreaming;
  else if (engine == "external")
    c.engine = Engine::External;
  else if (engine == "self_consistent")
    c.engine = Engine::SelfConsistent;
  else
    throw ConfigError("engine", "expected free_streaming, external or self_consistent");

  if (r.has("external")) {
    if (c.engine != Engine::External)
      throw ConfigError("external", "only valid with engine \"external\"");
    const Reader e(r.raw("external"), "external");
    e.allow({"E", "B"});
    c.external_E = e.vec3("E", c.external_E);
    c.external_B = e.vec3("B", c.external_B);
  }

  const std::string init = r.string("initial_fields", "zero");
  if (init == "zero")
    c.initial_fields = InitialFields::Zero;
  else if (init == "electrostatic")
    c.initial_fields = InitialFields::Electrostatic;
  else
    throw ConfigError("initial_fields", "expected \"zero\" or \"electrostatic\"");
  if (c.initial_fields == InitialFields::Electrostatic && c.engine != Engine::SelfConsistent)
    throw ConfigError("initial_fields", "electrostatic initialization needs engine \"self_consistent\"");

  if (c.engine == Engine::SelfConsistent) {
    const Grid3 g(c.L, c.n);
    if (c.dt > g.max_dt())
      throw ConfigError("dt", "violates the CFL limit h/sqrt(3) = " + std::to_string(g.max_dt()));
  }

  if (r.has("quadrature")) c.quadrature = parse_quadrature(Reader(r.raw("quadrature"), "quadrature"));
  if (r.has("probes")) {
    const json& arr = r.raw("probes");
    if (!arr.is_array()) throw ConfigError("probes", "expected an array of points");
    for (std::size_t i = 0; i < arr.size(); ++i)
      c.probes.push_back(Reader::as_vec3(arr[i], "probes[" + std::to_string(i) + "]"));
    if (!c.probes.empty() && (c.engine != Engine::SelfConsistent ||
                              c.initial_fields != InitialFields::Electrostatic))
      throw ConfigError("probes",
                        "need engine \"self_consistent\" with initial_fields \"electrostatic\"");
  }
  c.window_radius = r.number("window_radius", c.window_radius);
  non_negative(c.window_radius, "window_radius");
  if (r.has("criteria")) c.criteria = parse_criteria(Reader(r.raw("criteria"), "criteria"));
  else c.criteria = parse_criteria(Reader(json::object(), "criteria"));
  c.output = r.string("output", "");
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& file) {
  std::ifstream is(file);
  if (!is) throw ConfigError(file.string(), "cannot open");
  json j;
  try {
    j = json::parse(is);
  } catch (const json::parse_error& e) {
    throw ConfigError(file.string(), std::string("invalid JSON: ") + e.what());
  }
  return parse_scenario(j);
}

nlohmann::ordered_json to_json(const ScenarioConfig& c) {
  using oj = nlohmann::ordered_json;
  auto v3 = [](const Vec3& v) { return oj::array({v.x(), v.y(), v.z()}); };
  oj j;
  j["grid"] = {{"L", c.L}, {"n", c.n}};
  j["dt"] = c.dt;
  j["T"] = c.T;
  j["seed"] = c.seed;
  const EnsembleSpec& p = c.particles;
  j["particles"] = {{"count", p.count},
                    {"total_weight", p.total_weight},
                    {"space", p.space == EnsembleSpec::Space::Gaussian ? "gaussian" : "uniform"},
                    {"center", v3(p.center)},
                    {"x_sigma", p.x_sigma},
                    {"x_cutoff", p.x_cutoff},
                    {"box_L", p.box_L},
                    {"p_sigma", v3(p.p_sigma)},
                    {"p_drift", v3(p.p_drift)},
                    {"tail_exponent", p.tail_exponent},
                    {"p_cutoff", p.p_cutoff}};
  j["engine"] = engine_name(c.engine);
  if (c.engine == Engine::External) j["external"] = {{"E", v3(c.external_E)}, {"B", v3(c.external_B)}};
  j["initial_fields"] = c.initial_fields == InitialFields::Zero ? "zero" : "electrostatic";
  j["quadrature"] = {{"n_s", c.quadrature.n_s},
                     {"n_theta", c.quadrature.n_theta},
                     {"n_phi", c.quadrature.n_phi},
                     {"delta_vertex", c.quadrature.delta_vertex}};
  oj probes = oj::array();
  for (const Vec3& x : c.probes) probes.push_back(v3(x));
  j["probes"] = probes;
  j["window_radius"] = c.window_radius;
  oj pairs = oj::array();
  for (const NormPair& pr : c.criteria.pairs) {
    if (pr.q.is_infinite())
      pairs.push_back(oj::array({pr.theta, "inf"}));
    else
      pairs.push_back(oj::array({pr.theta, pr.q.value()}));
  }
  j["criteria"] = {{"pairs", pairs},
                   {"moments", c.criteria.moments},
                   {"bundle_size", c.criteria.bundle_size},
                   {"cadence", c.criteria.cadence},
                   {"binning_cells", c.criteria.binning_cells}};
  j["output"] = c.output;
  return j;
}

}  // namespace rvm::monitor
