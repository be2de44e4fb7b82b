#pragma once
// Batch evaluation of the interpolation and moment inequalities over a
// family of free-streamed ensembles, written as CSV.

#include <cstdint>
#include <string>
#include <vector>

#include "rvm/diagnostics.hpp"

namespace rvm::diagnostics {

struct InequalityRow {
  std::string check;   ///< interpolation | interpolation_special | prop81
  std::string params;  ///< e.g. "S=0;M=2;q=2"
  double time = 0.0;
  InequalityValue value;
  std::string grid_id;
  std::uint64_t seed = 0;
};

struct InequalitySurveySpec {
  std::uint64_t seed = 1;
  std::size_t particles = 20000;
  int ensembles = 4;
  std::vector<double> times{0.0, 0.25, 0.5, 1.0};
  BinningGrid grid{-1.0, 2.0, 8};
};

/// Ensemble e uses seed + e; each is a Gaussian blob with a Student-t
/// momentum tail, free-streamed to every listed time.
std::vector<InequalityRow> run_inequality_survey(const InequalitySurveySpec& spec,
                                                 const Executor& ex = Executor{});

/// Header: check,params,time,lhs,rhs,ratio,grid_id,seed.
std::string inequality_csv(const std::vector<InequalityRow>& rows);

}  // namespace rvm::diagnostics
