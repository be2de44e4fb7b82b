#pragma once
// Monitored runs: advances a scenario and records, at the configured
// cadence, every quantity the continuation criteria are stated in.
//
// kappa(t) is the largest |p_k| over the ensemble. For particle data this is
// exactly the momentum-support radius of f; the criterion integral of |K|
// is tracked over a finite bundle of characteristics, so its supremum is a
// bundle maximum and the report states the bundle coverage.

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rvm/characteristics.hpp"
#include "rvm/grid.hpp"
#include "rvm/scenario.hpp"

namespace rvm::monitor {

/// A non-finite value appeared in the particle or field state.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "paper+pallard" when theta > 4/q and q >= 6 (which implies the other),
/// "paper" when theta > 2/q and q > 2, otherwise "outside".
std::string regime_label(double theta, const diagnostics::Exponent& q);

struct ReportRow {
  int step = 0;
  double t = 0.0;
  double kappa = 0.0;
  double K_integral_max = 0.0;  ///< bundle max of the cumulative int |E| + |B|
  double energy = 0.0;
  double field_energy = 0.0;
  double kinetic = 0.0;  ///< 4 pi sum w p0
  double total_weight = 0.0;
  double det_deviation = 0.0;
  double F_sup = 1.0;
  double B_sup = 1.0;
  double max_div_B = 0.0;
  double pallard_rhs = 1.0;     ///< 1 + int ||K f p0||_{L^4 L^1} + int ||f p0||_{L^4 L^1}
  std::vector<double> M;        ///< one per criteria pair
  std::vector<double> moments;  ///< one per moment order
  std::vector<double> moment_rhs;
};

struct PallardBound {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio() const { return lhs / rhs; }
};

struct ProbeResult {
  Vec3 x = Vec3::Zero();
  EMField gs;
  EMField fdtd;
  double kt_bound_ratio = 0.0;  ///< (|E_T| + |B_T|) / bound integral
};

struct CriteriaReport {
  ScenarioConfig config;
  std::size_t particles = 0;
  std::vector<std::string> pair_labels;
  std::vector<ReportRow> rows;
  std::vector<std::size_t> bundle;  ///< particle indices, top-|p| members first
  std::size_t bundle_top = 0;
  std::vector<std::vector<double>> bundle_integrals;  ///< [row][member]
  std::vector<ProbeResult> probes;
  std::optional<FieldState> final_fields;
};

/// Deterministic in (config, seed); independent of the worker count.
/// Throws ConfigError for scenario-level inconsistencies found while running
/// (e.g. probes outside the causal window) and NumericalFailure on NaN.
CriteriaReport run_scenario(const ScenarioConfig& config, const Executor& ex = Executor{});

/// Final-time Pallard bound: bundle max of int |K| against 1 + the time
/// integrals of the L^4_x L^1_p norms of K f p0 and f p0.
PallardBound pallard_bound_check(const CriteriaReport& report);

std::string criteria_csv(const CriteriaReport& report);
std::string bundle_csv(const CriteriaReport& report);
nlohmann::ordered_json schema_json(const CriteriaReport& report);
nlohmann::ordered_json summary_json(const CriteriaReport& report);

/// Writes config.json, criteria.csv, bundle.csv, probes.csv (if any),
/// schema.json, summary.json and the final field snapshot into dir.
void write_run(const CriteriaReport& report, const std::filesystem::path& dir);

/// Human-readable digest of a run directory written by write_run.
std::string summarize_run(const std::filesystem::path& dir);

/// Fields linearly interpolated in time between two grid states, with
/// spatial gradients by central differences at half a grid cell.
class GridPairSampler final : public characteristics::FieldSampler {
 public:
  GridPairSampler(const FieldState& a, const FieldState& b) : a_(a), b_(b) {}
  EMField sample(double t, const Vec3& x) const override;
  double gradient_step() const override { return 0.5 * a_.grid().h(); }

 private:
  const FieldState& a_;
  const FieldState& b_;
};

}  // namespace rvm::monitor
