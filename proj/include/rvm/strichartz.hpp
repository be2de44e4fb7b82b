#pragma once

// Ratio ||u||_{L^q1_t L^r1_x} / ||F||_{L^q2'_t L^r2'_x} for the explicit
// cone solution u of box u = F with zero data.

#include <limits>

#include "rvm/cone.hpp"

namespace rvm {

struct StrichartzExponents {
  double q1;
  double r1;
  double q2p;  ///< q2', the dual time exponent of the source norm
  double r2p;  ///< r2'
};

/// Throws std::invalid_argument naming the violated relation:
///   1/q1 + 3/r1 = 1/q2' + 3/r2' - 2,  1/q1 <= 1/2 - 1/r1,
///   1/q2' >= 3/2 - 1/r2',  2 <= q1, q2 <= inf,  2 <= r1, r2 < inf.
void validate_strichartz(const StrichartzExponents& e);

/// Space-time evaluation window: n_space^3 cell midpoints of the cube of
/// half-width half_width around center, n_time Simpson intervals on [0, T].
struct StrichartzGrid {
  Vec3 center = Vec3::Zero();
  double half_width = 1.0;
  int n_space = 12;
  int n_time = 8;
  ConeQuadratureSpec cone{8, 6, 12, 1.0};
};

struct StrichartzResult {
  double u_norm = 0.0;
  double F_norm = 0.0;
  double ratio() const { return u_norm / F_norm; }
};

StrichartzResult strichartz_norms(const SpaceTimeScalar& F, const StrichartzExponents& e,
                                  const StrichartzGrid& grid, double T,
                                  const Executor& ex = Executor{});

double strichartz_ratio(const SpaceTimeScalar& F, const StrichartzExponents& e,
                        const StrichartzGrid& grid, double T, const Executor& ex = Executor{});

}  // namespace rvm
