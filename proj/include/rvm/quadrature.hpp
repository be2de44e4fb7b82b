#pragma once

#include <cstddef>
#include <vector>

namespace rvm {

struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [a, b]; exact for polynomials of degree 2n-1.
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Composite rule on the n+1 uniform nodes of [a, b] (n intervals): Simpson
/// panels, closing with a 3/8 panel when n is odd. Exact for cubics when
/// n >= 2; n == 1 falls back to the trapezoid rule.
QuadratureRule uniform_simpson(int n, double a, double b);

/// Trapezoid weights on n+1 uniform nodes of [a, b].
QuadratureRule uniform_trapezoid(int n, double a, double b);

}  // namespace rvm
