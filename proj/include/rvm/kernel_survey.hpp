#pragma once
// Report for the kernel bound checks: sampled maxima of each normalized
// kernel against an oracle constant from a deterministic (|p|, angle) scan.

#include <cstdint>

#include "json.hpp"
#include "rvm/kernels.hpp"

namespace rvm::kernels {

enum class Bound { HT, HS, b, Singularity };

const char* bound_name(Bound b);
double bound_ratio(Bound b, const KernelSample& s);

struct OracleConstant {
  double value = 0.0;
  double p_norm = 0.0;
  double theta = 0.0;  ///< angle between p and -w at the maximum
};

/// The normalized ratios depend on (p, w) only through |p| and the angle
/// between p and -w, so their supremum over the sampled domain is the
/// maximum over a log-spaced n_p x n_theta scan of that rectangle.
OracleConstant oracle_constant(Bound b, double p_min = 1e-3, double p_max = 1e3,
                               double theta_min = 1e-6, int n_p = 600, int n_theta = 600);

/// JSON document: sample count, seed, and per bound the oracle constant, the
/// sampled maximum, their ratio and the argmax sample.
nlohmann::ordered_json verify_kernels_report(std::uint64_t samples, std::uint64_t seed,
                                             const Executor& ex = Executor{});

}  // namespace rvm::kernels
