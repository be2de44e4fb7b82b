#pragma once

#include <vector>

#include "rvm/grid.hpp"

namespace rvm {

/// Free-space potential of the nodal charge rho (-lap phi = rho) by
/// zero-padded FFT convolution with G(r) = 1 / (4 pi r). Returns phi on the
/// doubled (2n)^3 padded grid; padded index (i, j, k) with i < n is grid
/// node i, larger indices lie outside the box.
std::vector<double> free_space_potential(const std::vector<double>& rho, const Grid3& g);

/// Sets E = -grad_h phi on the Yee locations (differences taken on the
/// padded potential, so the box faces see the free-space field) and B = 0.
void set_electrostatic_field(const std::vector<double>& rho, FieldState& f);

}  // namespace rvm
