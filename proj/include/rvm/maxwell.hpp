#pragma once

// Yee leapfrog for dE/dt = curl B - j, dB/dt = -curl E on the periodic grid.

#include "rvm/grid.hpp"

namespace rvm {

/// B -= dt curl E.
void advance_B(FieldState& f, double dt, const Executor& ex = Executor{});
/// E += dt (curl B - j); j may be null for vacuum.
void advance_E(FieldState& f, const Sources* src, double dt, const Executor& ex = Executor{});

/// Half B step, full E step with j at the half time, half B step: E and B
/// both end at t + dt. Throws on CFL violation.
void maxwell_step(FieldState& f, const Sources* src, double dt, const Executor& ex = Executor{});

/// 1/2 sum (|E|^2 + |B|^2 - dt^2/4 |curl_h E|^2) h^3, conserved to round-off
/// by maxwell_step when j = 0.
double leapfrog_invariant(const FieldState& f, double dt);

/// Continuity residual (rho1 - rho0)/dt + div_h j at nodes.
std::vector<double> continuity_residual(const Grid3& g, const std::vector<double>& rho0,
                                        const std::vector<double>& rho1, const Sources& j_mid,
                                        double dt);

}  // namespace rvm
