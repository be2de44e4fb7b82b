#pragma once
// Scenario configuration for monitored runs, read from JSON.
//
// {
//   "grid": {"L": 2.0, "n": 16},
//   "dt": 0.05, "T": 1.0, "seed": 1,
//   "particles": {"count": 4096, "total_weight": 0.01, "space": "gaussian",
//                 "center": [0,0,0], "x_sigma": 0.2, "x_cutoff": 0, "box_L": 1,
//                 "p_sigma": [0.1,0.1,0.1], "p_drift": [0,0,0],
//                 "tail_exponent": 0, "p_cutoff": 0},
//   "engine": "free_streaming" | "external" | "self_consistent",
//   "external": {"E": [0,0,0], "B": [0,0,1]},
//   "initial_fields": "zero" | "electrostatic",
//   "quadrature": {"n_s": 32, "n_theta": 4, "n_phi": 8, "delta_vertex": 0.5},
//   "probes": [[0.1,0,0]], "window_radius": 0,
//   "criteria": {"pairs": [[1.0, 4], [0.5, "inf"]], "moments": [0, 1, 2],
//                "bundle_size": 128, "cadence": 1, "binning_cells": 8},
//   "output": "runs/example"
// }
//
// Every key is optional except grid, dt and T. Unknown keys are rejected.

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rvm/cone.hpp"
#include "rvm/diagnostics.hpp"
#include "rvm/particles.hpp"

namespace rvm::monitor {

/// Validation failure; path is the dotted location in the config
/// ("particles.p_sigma[1]").
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& path, const std::string& msg)
      : std::invalid_argument(path + ": " + msg), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class Engine { FreeStreaming, External, SelfConsistent };
enum class InitialFields { Zero, Electrostatic };

const char* engine_name(Engine e);

struct NormPair {
  double theta;
  diagnostics::Exponent q;
};

struct CriteriaConfig {
  std::vector<NormPair> pairs;
  std::vector<double> moments{0.0, 1.0, 2.0};
  /// Half the bundle are the particles with the largest initial |p|, the
  /// rest are drawn at random from the remainder.
  std::size_t bundle_size = 128;
  int cadence = 1;  ///< report every cadence-th step
  int binning_cells = 8;
};

struct ScenarioConfig {
  double L = 2.0;
  int n = 16;
  double dt = 0.05;
  double T = 1.0;
  std::uint64_t seed = 1;
  EnsembleSpec particles;
  Engine engine = Engine::FreeStreaming;
  Vec3 external_E = Vec3::Zero();
  Vec3 external_B = Vec3::Zero();
  InitialFields initial_fields = InitialFields::Zero;
  ConeQuadratureSpec quadrature;
  std::vector<Vec3> probes;    ///< Glassey-Strauss evaluation points at t = T
  double window_radius = 0.0;  ///< 0 selects 1.5 h
  CriteriaConfig criteria;
  std::string output;

  int steps() const;
};

ScenarioConfig parse_scenario(const nlohmann::json& j);
/// Throws ConfigError with path "<file>" when the file is unreadable or not
/// JSON.
ScenarioConfig load_scenario(const std::filesystem::path& file);
nlohmann::ordered_json to_json(const ScenarioConfig& c);

}  // namespace rvm::monitor
