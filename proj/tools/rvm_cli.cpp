// rvm: run monitored scenarios and the kernel / inequality verification
// suites. Exit codes: 0 success, 2 invalid input, 3 non-finite state, 1 other.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rvm/inequality_survey.hpp"
#include "rvm/kernel_survey.hpp"
#include "rvm/monitor.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumerical = 3;

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out, std::ios::binary);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relativistic Vlasov-Maxwell continuation-criteria monitor"};
  app.require_subcommand(1);
  app.fallthrough();

  std::optional<std::uint64_t> seed;
  int workers = 1;
  std::string out;
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--out", out, "output directory (run) or file (verify-*)");

  auto* run = app.add_subcommand("run", "run a scenario and write the criteria report");
  std::string config;
  run->add_option("config", config, "scenario JSON")->required();

  auto* vk = app.add_subcommand("verify-kernels", "sample the kernel bounds, JSON report");
  std::uint64_t samples = 1000000;
  vk->add_option("--samples", samples, "number of random (p, w) samples");

  auto* vi = app.add_subcommand("verify-inequalities", "evaluate the norm inequalities, CSV");
  rvm::diagnostics::InequalitySurveySpec ispec;
  vi->add_option("--particles", ispec.particles, "particles per ensemble");
  vi->add_option("--ensembles", ispec.ensembles, "number of ensembles");

  auto* rp = app.add_subcommand("report", "summarize a run directory");
  std::string run_dir;
  rp->add_option("run-dir", run_dir, "directory written by run")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitValidation;
  }

  const rvm::Executor ex(workers);
  try {
    if (*run) {
      rvm::monitor::ScenarioConfig cfg = rvm::monitor::load_scenario(config);
      if (seed) cfg.seed = *seed;
      std::string dir = !out.empty() ? out : cfg.output;
      if (dir.empty()) dir = "runs/" + std::filesystem::path(config).stem().string();
      const rvm::monitor::CriteriaReport rep = rvm::monitor::run_scenario(cfg, ex);
      rvm::monitor::write_run(rep, dir);
      std::cout << rvm::monitor::summarize_run(dir);
    } else if (*vk) {
      emit(rvm::kernels::verify_kernels_report(samples, seed.value_or(1), ex).dump(2) + "\n", out);
    } else if (*vi) {
      ispec.seed = seed.value_or(1);
      emit(rvm::diagnostics::inequality_csv(rvm::diagnostics::run_inequality_survey(ispec, ex)), out);
    } else if (*rp) {
      std::cout << rvm::monitor::summarize_run(run_dir);
    }
  } catch (const rvm::monitor::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const rvm::monitor::ConfigError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
